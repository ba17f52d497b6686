#include "ff/field.hpp"

#include <json.hpp>

namespace ff {

FormalField::FormalField(std::string name, Fsl fsl, Kind domain, Kind range)
    : name_(std::move(name)), fsl_(std::move(fsl)), domain_(std::move(domain)), range_(std::move(range)) {
    if (!fsl_.types().contains(domain_.type) || !fsl_.types().contains(range_.type)) {
        throw Error(ErrorCode::UnknownType, "field '" + name_ + "' names a kind outside its type set");
    }
}

PrimitiveId FormalField::register_primitive(Primitive primitive) { return fsl_.add(std::move(primitive)); }

void FormalField::validate() const {
    bool consumes = false;
    bool returns = false;
    const auto& types = fsl_.types();
    for (const auto& p : fsl_.primitives()) {
        if (p.is_stack_op()) continue;
        for (TypeId a : p.signature.args) consumes = consumes || types.conforms(domain_.type, a);
        returns = returns || types.conforms(p.signature.ret, range_.type);
    }
    if (!consumes) throw Error(ErrorCode::InvalidArgument, "field '" + name_ + "': no primitive consumes the domain");
    if (!returns) throw Error(ErrorCode::InvalidArgument, "field '" + name_ + "': no primitive returns the range");
}

ExecutionTrace run_from(const FormalField& field, StackState state, std::span<const Opcode> code) {
    return execute_core(std::move(state), code, field.fsl(), field.range().type, field.limits());
}

ExecutionTrace run_code(const FormalField& field, const Value& x, std::span<const Opcode> code) {
    if (!field.types().conforms(x.type(), field.domain().type)) {
        ExecutionTrace t;
        t.final_stack.entries.push_back(x);
        t.status = Status::Error;
        t.error = ErrorInfo{ErrorCode::TypeMismatch, "input does not conform to the field domain", 0};
        return t;
    }
    StackState s;
    s.entries.push_back(x);
    return run_from(field, std::move(s), code);
}

bool is_snippet(const FormalField& field, const Value& x, std::span<const Opcode> code) {
    if (code.empty() || code.back().is_push()) return false;
    auto trace = run_code(field, x, code);
    return trace.ok() && !trace.results.empty() && trace.results.back().index + 1 == code.size();
}

FieldId FieldRegistry::register_field(FieldPtr field) {
    if (!field) throw Error(ErrorCode::InvalidArgument, "null field");
    if (by_name_.contains(field->name())) {
        throw Error(ErrorCode::DuplicateName, "field '" + field->name() + "' already registered");
    }
    field->validate();
    FieldId id{static_cast<std::uint32_t>(fields_.size())};
    by_name_.emplace(field->name(), id);
    fields_.push_back(std::move(field));
    return id;
}

FieldPtr FieldRegistry::find(std::string_view name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : fields_[it->second.value];
}

FieldPtr FieldRegistry::get(FieldId id) const {
    if (id.value >= fields_.size()) throw Error(ErrorCode::UnknownField, "field id " + std::to_string(id.value));
    return fields_[id.value];
}

void PrimitiveLibrary::add_kind(std::string name, std::string type_name, std::string description) {
    if (kinds_.contains(name)) throw Error(ErrorCode::DuplicateName, "kind '" + name + "' already defined");
    kinds_.emplace(std::move(name), KindDef{std::move(type_name), std::move(description)});
}

void PrimitiveLibrary::add(std::string name, Factory factory) {
    if (factories_.contains(name)) throw Error(ErrorCode::DuplicateName, "library primitive '" + name + "'");
    order_.push_back(name);
    factories_.emplace(std::move(name), std::move(factory));
}

std::vector<std::string> PrimitiveLibrary::primitive_names() const { return order_; }

void PrimitiveLibrary::install_types(TypeSet& types) const {
    if (installer_) installer_(types);
}

Primitive PrimitiveLibrary::make(std::string_view name, const TypeSet& types) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) {
        throw Error(ErrorCode::UnknownPrimitive, "library '" + name_ + "' has no primitive '" + std::string(name) + "'");
    }
    Primitive p = it->second(types);
    p.name = std::string(name);
    return p;
}

Kind PrimitiveLibrary::kind(std::string_view name, const TypeSet& types) const {
    auto it = kinds_.find(name);
    if (it == kinds_.end()) throw Error(ErrorCode::UnknownType, "unknown kind '" + std::string(name) + "'");
    return Kind{std::string(name), types.require(it->second.type_name), it->second.description};
}

FieldPtr load_field_manifest(std::string_view json_text, const PrimitiveLibrary& library) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("field manifest: ") + e.what());
    }
    try {
        Fsl fsl;
        library.install_types(fsl.types());
        Kind domain = library.kind(doc.at("domain").get<std::string>(), fsl.types());
        Kind range = library.kind(doc.at("range").get<std::string>(), fsl.types());
        auto field = std::make_shared<FormalField>(doc.at("name").get<std::string>(), std::move(fsl), domain, range);

        std::vector<std::string> names;
        const auto& prims = doc.at("primitives");
        if (prims.is_string() && prims.get<std::string>() == "all") {
            names = library.primitive_names();
        } else {
            names = prims.get<std::vector<std::string>>();
        }
        for (const auto& n : names) field->register_primitive(library.make(n, field->types()));

        if (doc.contains("limits")) {
            ResourceLimits limits;
            const auto& l = doc["limits"];
            limits.max_steps = l.value("max_steps", limits.max_steps);
            limits.max_stack_depth = l.value("max_stack_depth", limits.max_stack_depth);
            limits.max_tensor_cells = l.value("max_tensor_cells", limits.max_tensor_cells);
            field->set_limits(limits);
        }
        field->validate();
        return field;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("field manifest: ") + e.what());
    }
}

}  // namespace ff
