#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ff/opcode.hpp"
#include "ff/value.hpp"

namespace ff {

// Little-endian byte sink used by the binary state format.
class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v);
    void str(std::string_view s);

    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t> bytes_;
};

// Bounds-checked reader; any overrun throws corrupt-file.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64();
    std::string str();

    bool at_end() const noexcept { return pos_ == bytes_.size(); }
    std::size_t position() const noexcept { return pos_; }

private:
    std::uint64_t get(int n);

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_value(ByteWriter& w, const Value& v);
Value read_value(ByteReader& r);

// Length-prefixed list of (variant tag, primitive id | constant Value).
void write_code(ByteWriter& w, std::span<const Opcode> code);
Code read_code(ByteReader& r);

// FNV-1a, 64 bit.
std::uint64_t checksum(std::span<const std::uint8_t> bytes);

}  // namespace ff
