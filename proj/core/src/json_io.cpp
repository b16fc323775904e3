#include "mdms/json_io.hpp"

#include <json.hpp>

#include "mdms/errors.hpp"

namespace mdms {

using Json = nlohmann::ordered_json;

namespace {

std::string dump(const Json& j, JsonStyle style) { return j.dump(style.pretty ? 2 : -1); }

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename T>
T get_field(const Json& j, const char* key) {
    try {
        return j.at(key).template get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad or missing field '" + std::string(key) + "': " + e.what());
    }
}

Json spec_to_value(const GroupSpec& spec) {
    Json modules = Json::array();
    for (const ModuleSpec& m : spec.modules()) {
        if (m.kind == ModuleSpec::Kind::Cyclic) {
            modules.push_back(Json{{"cyclic", m.modulus}});
        } else {
            modules.push_back(Json{{"vector_space", Json{{"p", m.modulus}, {"dim", m.dim}}}});
        }
    }
    return Json{{"h", spec.h()}, {"modules", std::move(modules)}};
}

GroupSpecPtr spec_from_value(const Json& j) {
    int h = get_field<int>(j, "h");
    std::vector<ModuleSpec> modules;
    try {
        for (const Json& m : j.at("modules")) {
            if (m.contains("cyclic")) {
                modules.push_back(cyclic_module(m.at("cyclic").get<std::uint64_t>()));
            } else if (m.contains("vector_space")) {
                const Json& v = m.at("vector_space");
                modules.push_back(vector_space_module(v.at("p").get<std::uint64_t>(),
                                                      v.at("dim").get<std::uint32_t>()));
            } else {
                throw IoError("module entry must be 'cyclic' or 'vector_space'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad module list: ") + e.what());
    }
    return make_group_spec(std::move(modules), h);
}

/// Elements serialize as per-module coordinate arrays: a cyclic module
/// contributes a number, a vector-space module a dim-long array.
Json element_to_value(const GroupSpec& spec, std::uint64_t index) {
    std::vector<std::uint64_t> digits = spec.decode(index);
    Json out = Json::array();
    for (std::size_t i = 0; i < spec.modules().size(); ++i) {
        const ModuleSpec& m = spec.modules()[i];
        std::size_t first = spec.module_first_digit(i);
        if (m.kind == ModuleSpec::Kind::Cyclic) {
            out.push_back(digits[first]);
        } else {
            Json coords = Json::array();
            for (std::uint32_t d = 0; d < m.dim; ++d) coords.push_back(digits[first + d]);
            out.push_back(std::move(coords));
        }
    }
    return out;
}

std::uint64_t element_from_value(const GroupSpec& spec, const Json& j) {
    if (!j.is_array() || j.size() != spec.modules().size())
        throw IoError("element must be an array with one entry per module");
    std::vector<std::uint64_t> digits;
    digits.reserve(spec.digit_count());
    try {
        for (std::size_t i = 0; i < spec.modules().size(); ++i) {
            const ModuleSpec& m = spec.modules()[i];
            if (m.kind == ModuleSpec::Kind::Cyclic) {
                digits.push_back(j[i].get<std::uint64_t>());
            } else {
                if (!j[i].is_array() || j[i].size() != m.dim)
                    throw IoError("vector-space coordinate must be a dim-long array");
                for (const Json& c : j[i]) digits.push_back(c.get<std::uint64_t>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad element coordinates: ") + e.what());
    }
    return spec.encode(digits);
}

std::string bits_to_hex(const Bitset& bits) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t nbytes = (bits.size() + 7) / 8;
    std::string out;
    out.reserve(nbytes * 2);
    for (std::uint64_t b = 0; b < nbytes; ++b) {
        std::uint64_t byte = (bits.words()[b / 8] >> (8 * (b % 8))) & 0xff;
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

void hex_to_bits(const std::string& hex, Bitset& bits) {
    std::uint64_t nbytes = (bits.size() + 7) / 8;
    if (hex.size() != nbytes * 2)
        throw IoError("bits_hex has " + std::to_string(hex.size()) + " digits, expected " +
                      std::to_string(nbytes * 2));
    auto nibble = [](char c) -> std::uint64_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint64_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint64_t>(c - 'a' + 10);
        throw IoError("bits_hex must be lowercase hex");
    };
    // Reject stray bits beyond the group size before touching the words.
    for (std::uint64_t b = bits.size(); b < nbytes * 8; ++b) {
        std::uint64_t byte = (nibble(hex[2 * (b / 8)]) << 4) | nibble(hex[2 * (b / 8) + 1]);
        if ((byte >> (b % 8)) & 1) throw IoError("bits_hex sets bits beyond the group size");
    }
    for (std::uint64_t b = 0; b < nbytes; ++b) {
        std::uint64_t byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
        bits.words()[b / 8] |= byte << (8 * (b % 8));
    }
}

Json pair_to_value(const GroupSpec& spec, const AdmissiblePair& pair) {
    Json support = Json::array();
    for (const PairEntry& e : pair.support)
        support.push_back(Json{{"element", element_to_value(spec, e.element)},
                               {"alpha", e.alpha},
                               {"beta", e.beta}});
    return Json{{"support", std::move(support)}};
}

AdmissiblePair pair_from_value(const GroupSpec& spec, const Json& j) {
    AdmissiblePair pair;
    try {
        for (const Json& e : j.at("support"))
            pair.support.push_back(PairEntry{element_from_value(spec, e.at("element")),
                                             e.at("alpha").get<int>(), e.at("beta").get<int>()});
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad admissible pair: ") + e.what());
    }
    return pair;
}

Json schedule_to_value(const EpsilonSchedule& schedule) {
    Json levels = Json::array();
    for (const Rational& l : schedule.levels) levels.push_back(rational_to_string(l));
    return Json{{"epsilon", rational_to_string(schedule.epsilon)}, {"levels", std::move(levels)}};
}

EpsilonSchedule schedule_from_value(const Json& j) {
    EpsilonSchedule schedule;
    schedule.epsilon = parse_rational(get_field<std::string>(j, "epsilon"));
    try {
        for (const Json& l : j.at("levels")) schedule.levels.push_back(parse_rational(l.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad schedule levels: ") + e.what());
    }
    schedule.validate();
    return schedule;
}

}  // namespace

std::string group_spec_to_json(const GroupSpec& spec, JsonStyle style) {
    return dump(spec_to_value(spec), style);
}

GroupSpecPtr group_spec_from_json(const std::string& text) {
    return spec_from_value(parse(text));
}

std::string group_set_to_json(const GroupSet& set, JsonStyle style) {
    Json j;
    j["spec"] = spec_to_value(*set.spec());
    if (style.pretty) {
        Json elements = Json::array();
        set.bits().for_each_set(
            [&](std::uint64_t i) { elements.push_back(element_to_value(*set.spec(), i)); });
        j["elements"] = std::move(elements);
    } else {
        j["cardinality"] = set.cardinality();
        j["bits_hex"] = bits_to_hex(set.bits());
    }
    return dump(j, style);
}

GroupSet group_set_from_json(const std::string& text) {
    Json j = parse(text);
    GroupSpecPtr spec = spec_from_value(j.contains("spec") ? j.at("spec") : j);
    GroupSet set(spec);
    if (j.contains("elements")) {
        for (const Json& e : j.at("elements")) set.insert(element_from_value(*spec, e));
    } else if (j.contains("bits_hex")) {
        hex_to_bits(get_field<std::string>(j, "bits_hex"), set.bits());
        if (j.contains("cardinality") &&
            get_field<std::uint64_t>(j, "cardinality") != set.cardinality())
            throw IoError("cardinality does not match bits_hex");
    } else {
        throw IoError("set JSON needs 'elements' or 'bits_hex'");
    }
    return set;
}

std::string int_set_to_json(const IntSet& set) { return Json(set).dump(); }

std::string element_to_json(const GroupSpec& spec, std::uint64_t index) {
    return element_to_value(spec, index).dump();
}

std::uint64_t element_from_json(const GroupSpec& spec, const std::string& text) {
    return element_from_value(spec, parse(text));
}

IntSet int_set_from_json(const std::string& text) {
    Json j = parse(text);
    if (!j.is_array()) throw IoError("integer set must be a JSON array");
    std::vector<std::int64_t> values;
    try {
        for (const Json& v : j) values.push_back(v.get<std::int64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad integer set: ") + e.what());
    }
    return make_int_set(std::move(values));
}

std::string state_to_json(const ConstructionState& state, JsonStyle style) {
    // Rebuild the stage chain so history pairs serialize against the spec
    // they live on.
    std::vector<ConstructionState> stages{state};
    while (has_previous_stage(stages.back())) stages.push_back(previous_state(stages.back()));
    std::reverse(stages.begin(), stages.end());

    Json j;
    j["format"] = kStateFormat;
    j["h"] = state.h;
    j["k"] = state.k;
    j["schedule"] = schedule_to_value(state.schedule);
    j["spec"] = spec_to_value(*state.spec);

    Json f;
    switch (state.f.kind()) {
        case FnTable::Kind::InitialClosedForm:
            f["kind"] = "initial_closed_form";
            break;
        case FnTable::Kind::InductiveLayer:
            f["kind"] = "inductive_layer";
            break;
        case FnTable::Kind::Explicit: {
            f["kind"] = "explicit";
            Json table = Json::array();
            for (std::uint64_t v : state.f.table()) table.push_back(element_to_value(*state.spec, v));
            f["table"] = std::move(table);
            break;
        }
    }
    j["f"] = std::move(f);
    j["restricted"] = state.restricted;
    j["taints"] = state.taints;

    Json history = Json::array();
    for (std::size_t i = 0; i < state.history.size(); ++i) {
        const StageRecord& record = state.history[i];
        Json r;
        r["stage"] = record.stage;
        r["module_sizes"] = record.module_sizes;
        r["required_bound"] = rational_to_string(record.required_bound);
        r["restricted"] = record.restricted;
        r["taints"] = record.taints;
        if (record.stage > 1) {
            r["full_pair_count"] = record.full_pair_count.str();
            const GroupSpec& pair_spec = *stages[i - 1].spec;
            Json pairs = Json::array();
            for (const AdmissiblePair& pair : record.pairs)
                pairs.push_back(pair_to_value(pair_spec, pair));
            r["pairs"] = std::move(pairs);
        }
        history.push_back(std::move(r));
    }
    j["history"] = std::move(history);
    return dump(j, style);
}

ConstructionState state_from_json(const std::string& text) {
    Json j = parse(text);
    if (get_field<std::string>(j, "format") != kStateFormat)
        throw IoError("not a " + std::string(kStateFormat) + " artifact");

    ConstructionState state;
    state.h = get_field<int>(j, "h");
    state.k = get_field<int>(j, "k");
    state.schedule = schedule_from_value(j.at("schedule"));
    state.spec = spec_from_value(j.at("spec"));

    // Rebuild the stage chain from the history records.
    const Json& history = j.at("history");
    if (!history.is_array() || history.empty()) throw IoError("state history is empty");

    std::vector<GroupSpecPtr> chain;
    std::size_t consumed = get_field<std::vector<std::uint64_t>>(history[0], "module_sizes").size();
    const auto& all_modules = state.spec->modules();
    if (consumed > all_modules.size()) throw IoError("history does not match the spec");
    chain.push_back(make_group_spec(
        std::vector<ModuleSpec>(all_modules.begin(), all_modules.begin() + static_cast<std::ptrdiff_t>(consumed)),
        state.h));

    for (std::size_t i = 1; i < history.size(); ++i) {
        std::size_t added = history[i].at("pairs").size();
        consumed += added;
        if (consumed > all_modules.size()) throw IoError("history does not match the spec");
        chain.push_back(make_group_spec(
            std::vector<ModuleSpec>(all_modules.begin(),
                                    all_modules.begin() + static_cast<std::ptrdiff_t>(consumed)),
            state.h));
    }
    if (consumed != all_modules.size())
        throw IoError("history stages do not account for every module in the spec");

    for (std::size_t i = 0; i < history.size(); ++i) {
        const Json& r = history[i];
        StageRecord record;
        record.stage = get_field<int>(r, "stage");
        record.module_sizes = get_field<std::vector<std::uint64_t>>(r, "module_sizes");
        record.required_bound = parse_rational(get_field<std::string>(r, "required_bound"));
        record.restricted = get_field<bool>(r, "restricted");
        record.taints = get_field<std::vector<std::string>>(r, "taints");
        if (record.stage > 1) {
            record.full_pair_count = BigInt(get_field<std::string>(r, "full_pair_count"));
            for (const Json& pj : r.at("pairs"))
                record.pairs.push_back(pair_from_value(*chain[i - 1], pj));
        }
        state.history.push_back(std::move(record));
    }

    const std::string f_kind = get_field<std::string>(j.at("f"), "kind");
    if (f_kind == "explicit") {
        std::vector<std::uint64_t> table;
        for (const Json& e : j.at("f").at("table"))
            table.push_back(element_from_value(*state.spec, e));
        if (table.size() != state.spec->total_size())
            throw IoError("explicit table must cover the whole group");
        state.f = FnTable::explicit_table(state.spec, std::move(table));
    } else {
        FnTable f = FnTable::initial_closed_form(chain.front());
        for (std::size_t i = 1; i < chain.size(); ++i)
            f = FnTable::inductive_layer(chain[i], f, state.history[i].pairs);
        if (f_kind == "initial_closed_form") {
            if (chain.size() != 1) throw IoError("closed-form f on a multi-stage state");
        } else if (f_kind != "inductive_layer") {
            throw IoError("unknown f kind '" + f_kind + "'");
        }
        state.f = f;
    }

    if (state.k != static_cast<int>(history.size()) && f_kind != "explicit")
        throw IoError("state stage k does not match its history");
    state.restricted = get_field<bool>(j, "restricted");
    state.taints = get_field<std::vector<std::string>>(j, "taints");
    return state;
}

std::string certificates_to_json(const std::vector<Certificate>& certificates, JsonStyle style) {
    Json out = Json::array();
    for (const Certificate& cert : certificates) {
        Json c;
        c["format"] = kCertFormat;
        c["claim"] = to_string(cert.claim);
        Json params = Json::object();
        for (const auto& [key, value] : cert.parameters) params[key] = value;
        c["parameters"] = std::move(params);
        Json measured = Json::object();
        for (const auto& [key, value] : cert.measured) measured[key] = value;
        c["measured"] = std::move(measured);
        c["bound"] = rational_to_string(cert.bound);
        c["verdict"] = cert.pass ? "pass" : "fail";
        c["taints"] = cert.taints;
        c["notes"] = cert.notes;
        out.push_back(std::move(c));
    }
    return dump(out, style);
}

std::string search_report_to_json(const SearchReport& report, JsonStyle style) {
    Json j;
    j["format"] = kSearchFormat;
    j["p"] = report.p;
    j["h"] = report.h;
    if (report.strategy.kind == SearchStrategy::Kind::Exhaustive) {
        j["strategy"] = Json{{"kind", "exhaustive"}};
    } else {
        j["strategy"] = Json{{"kind", "randomized"},
                             {"seed", report.strategy.seed},
                             {"iterations", report.strategy.iterations}};
    }
    j["found"] = report.found;
    if (report.found) {
        j["best_set"] = report.best_set;
        j["best_density"] = rational_to_string(report.best_density);
    }
    // Wall time stays out of the artifact; the run manifest carries it.
    j["sets_examined"] = report.sets_examined;
    return dump(j, style);
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) out.push_back(digits[(hash >> shift) & 0xf]);
    return out;
}

}  // namespace mdms
