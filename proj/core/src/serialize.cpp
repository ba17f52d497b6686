#include "ff/serialize.hpp"

#include <bit>

namespace ff {

namespace {

enum class ValueTag : std::uint8_t { IntTensor = 0, RealTensor = 1, Tuple = 2, Error = 3 };

constexpr std::uint32_t kMaxCount = 1u << 28;

std::uint32_t checked_count(ByteReader& r) {
    std::uint32_t n = r.u32();
    if (n > kMaxCount) throw Error(ErrorCode::CorruptFile, "implausible element count");
    return n;
}

}  // namespace

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
}

std::uint64_t ByteReader::get(int n) {
    if (bytes_.size() - pos_ < static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::CorruptFile, "unexpected end of data");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    std::uint32_t n = checked_count(*this);
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::CorruptFile, "unexpected end of data");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

void write_value(ByteWriter& w, const Value& v) {
    w.u16(v.type().value);
    switch (v.category()) {
    case Category::Tensor: {
        const Tensor& t = v.as_tensor();
        w.u8(static_cast<std::uint8_t>(t.is_real() ? ValueTag::RealTensor : ValueTag::IntTensor));
        w.u32(static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) w.i32(d);
        w.u32(static_cast<std::uint32_t>(t.cell_count()));
        if (t.is_real()) {
            for (double x : t.reals()) w.f64(x);
        } else {
            for (std::int32_t x : t.ints()) w.i32(x);
        }
        break;
    }
    case Category::Tuple:
        w.u8(static_cast<std::uint8_t>(ValueTag::Tuple));
        w.u32(static_cast<std::uint32_t>(v.members().size()));
        for (const auto& m : v.members()) write_value(w, m);
        break;
    case Category::Error: {
        const auto& e = v.error_info();
        w.u8(static_cast<std::uint8_t>(ValueTag::Error));
        w.u8(static_cast<std::uint8_t>(e.code));
        w.u64(e.opcode_index);
        w.str(e.message);
        break;
    }
    }
}

Value read_value(ByteReader& r) {
    TypeId type{r.u16()};
    auto tag = static_cast<ValueTag>(r.u8());
    switch (tag) {
    case ValueTag::IntTensor:
    case ValueTag::RealTensor: {
        std::vector<int> shape(checked_count(r));
        for (auto& d : shape) d = r.i32();
        std::uint32_t n = checked_count(r);
        if (tag == ValueTag::RealTensor) {
            std::vector<double> data(n);
            for (auto& x : data) x = r.f64();
            return Value::tensor(type, Tensor{std::move(shape), std::move(data)});
        }
        std::vector<std::int32_t> data(n);
        for (auto& x : data) x = r.i32();
        return Value::tensor(type, Tensor{std::move(shape), std::move(data)});
    }
    case ValueTag::Tuple: {
        Tuple members(checked_count(r));
        for (auto& m : members) m = read_value(r);
        return Value::tuple(type, std::move(members));
    }
    case ValueTag::Error: {
        auto code = static_cast<ErrorCode>(r.u8());
        std::uint64_t index = r.u64();
        std::string message = r.str();
        return Value::error(code, std::move(message), static_cast<std::size_t>(index));
    }
    }
    throw Error(ErrorCode::CorruptFile, "unknown value tag");
}

void write_code(ByteWriter& w, std::span<const Opcode> code) {
    w.u32(static_cast<std::uint32_t>(code.size()));
    for (const auto& op : code) {
        w.u8(static_cast<std::uint8_t>(op.kind));
        if (op.is_call()) {
            w.u16(op.primitive.value);
        } else {
            write_value(w, op.constant);
        }
    }
}

Code read_code(ByteReader& r) {
    Code code(checked_count(r));
    for (auto& op : code) {
        std::uint8_t tag = r.u8();
        if (tag == static_cast<std::uint8_t>(Opcode::Kind::Call)) {
            op = Opcode::call(PrimitiveId{r.u16()});
        } else if (tag == static_cast<std::uint8_t>(Opcode::Kind::Push)) {
            op = Opcode::push(read_value(r));
        } else {
            throw Error(ErrorCode::CorruptFile, "unknown opcode tag");
        }
    }
    return code;
}

std::uint64_t checksum(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ff
