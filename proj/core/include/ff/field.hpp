#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ff/fsl.hpp"
#include "ff/opcode.hpp"
#include "ff/vm.hpp"

namespace ff {

// A data type with a system-wide purpose. Kinds X and Y bound a field.
struct Kind {
    std::string name;
    TypeId type;
    std::string description;
};

// (X, Y, L): a domain kind, a range kind and the language code runs in.
// Mutable while it is being assembled; shared as `const` afterwards.
class FormalField {
public:
    FormalField(std::string name, Fsl fsl, Kind domain, Kind range);

    const std::string& name() const noexcept { return name_; }
    const Kind& domain() const noexcept { return domain_; }
    const Kind& range() const noexcept { return range_; }
    const Fsl& fsl() const noexcept { return fsl_; }
    const TypeSet& types() const noexcept { return fsl_.types(); }
    const ResourceLimits& limits() const noexcept { return limits_; }
    void set_limits(ResourceLimits limits) { limits_ = limits; }

    PrimitiveId register_primitive(Primitive primitive);

    // Throws invalid-argument unless some primitive consumes X and some
    // primitive returns Y.
    void validate() const;

private:
    std::string name_;
    Fsl fsl_;
    Kind domain_;
    Kind range_;
    ResourceLimits limits_;
};

using FieldPtr = std::shared_ptr<const FormalField>;

// The field-level core c(s, o*) -> Y*: the kernel core seeded with [x].
ExecutionTrace run_code(const FormalField& field, const Value& x, std::span<const Opcode> code);

// Same, from an arbitrary stack state (used when items continue a snippet).
ExecutionTrace run_from(const FormalField& field, StackState state, std::span<const Opcode> code);

// True when `code` runs cleanly on x and its final opcode yields a Y result.
bool is_snippet(const FormalField& field, const Value& x, std::span<const Opcode> code);

struct FieldId {
    std::uint32_t value = 0;
    auto operator<=>(const FieldId&) const = default;
};

class FieldRegistry {
public:
    FieldId register_field(FieldPtr field);
    FieldPtr find(std::string_view name) const;
    FieldPtr get(FieldId id) const;
    std::size_t size() const noexcept { return fields_.size(); }

private:
    std::vector<FieldPtr> fields_;
    std::map<std::string, FieldId, std::less<>> by_name_;
};

// Compiled-in primitive implementations that field manifests bind to by
// name. A library installs its types once per FSL, then hands out
// primitives built against that type set.
class PrimitiveLibrary {
public:
    using TypeInstaller = std::function<void(TypeSet&)>;
    using Factory = std::function<Primitive(const TypeSet&)>;

    explicit PrimitiveLibrary(std::string name) : name_(std::move(name)) {}

    void set_type_installer(TypeInstaller installer) { installer_ = std::move(installer); }
    void add_kind(std::string name, std::string type_name, std::string description);
    void add(std::string name, Factory factory);

    const std::string& name() const noexcept { return name_; }
    std::vector<std::string> primitive_names() const;
    bool has(std::string_view name) const { return factories_.contains(std::string(name)); }

    void install_types(TypeSet& types) const;
    Primitive make(std::string_view name, const TypeSet& types) const;
    Kind kind(std::string_view name, const TypeSet& types) const;

private:
    struct KindDef {
        std::string type_name;
        std::string description;
    };

    std::string name_;
    TypeInstaller installer_;
    std::vector<std::string> order_;
    std::map<std::string, Factory, std::less<>> factories_;
    std::map<std::string, KindDef, std::less<>> kinds_;
};

// Declarative field manifest (JSON):
//   {"name": "arc", "domain": "grid", "range": "grid",
//    "primitives": ["identity_grid", ...] | "all",
//    "limits": {"max_steps": 1024, ...}}
FieldPtr load_field_manifest(std::string_view json_text, const PrimitiveLibrary& library);

}  // namespace ff
