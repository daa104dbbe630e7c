#include "mapruin/model_io.hpp"

#include "mapruin/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mapruin {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) {
    throw ValidationError({{ErrorCode::ParseError, msg}});
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) parse_fail(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) parse_fail("unknown key '" + key + "' in " + where);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) parse_fail(where + " must be an integer");
    return j.get<int>();
}

std::vector<std::vector<double>> matrix(const json& j, const std::string& where) {
    if (!j.is_array()) parse_fail(where + " must be an array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) parse_fail(where + " row " + std::to_string(r) + " must be an array");
        std::vector<double> row;
        for (const auto& x : j[r]) row.push_back(number(x, where));
        out.push_back(std::move(row));
    }
    return out;
}

MixtureComponent component(const json& j, const std::string& where) {
    check_keys(j, {"weight", "kind", "params"}, where);
    const double w = number(require(j, "weight", where), where + ".weight");
    const json& kind = require(j, "kind", where);
    if (!kind.is_string()) parse_fail(where + ".kind must be a string");
    const json& p = require(j, "params", where);
    const std::string k = kind.get<std::string>();
    if (k == "atom") {
        check_keys(p, {"location"}, where + ".params");
        return {w, Atom{number(require(p, "location", where), where + ".location")}};
    }
    if (k == "exponential") {
        check_keys(p, {"rate"}, where + ".params");
        return {w, Exponential{number(require(p, "rate", where), where + ".rate")}};
    }
    if (k == "erlang") {
        check_keys(p, {"shape", "rate"}, where + ".params");
        return {w, Erlang{integer(require(p, "shape", where), where + ".shape"),
                          number(require(p, "rate", where), where + ".rate")}};
    }
    parse_fail(where + ".kind '" + k + "' is not one of atom, exponential, erlang");
}

json component_json(const MixtureComponent& c) {
    json j{{"weight", c.weight}};
    if (const auto* a = std::get_if<Atom>(&c.kind)) {
        j["kind"] = "atom";
        j["params"] = {{"location", a->location}};
    } else if (const auto* e = std::get_if<Exponential>(&c.kind)) {
        j["kind"] = "exponential";
        j["params"] = {{"rate", e->rate}};
    } else if (const auto* e = std::get_if<Erlang>(&c.kind)) {
        j["kind"] = "erlang";
        j["params"] = {{"shape", e->shape}, {"rate", e->rate}};
    }
    return j;
}

}  // namespace

RawModel parse_model(const json& doc) {
    check_keys(doc, {"states", "v", "C", "D", "jumps"}, "model");
    RawModel raw;
    raw.states = integer(require(doc, "states", "model"), "states");
    const json& v = require(doc, "v", "model");
    if (!v.is_array()) parse_fail("v must be an array");
    for (const auto& x : v) raw.v.push_back(number(x, "v"));
    raw.C = matrix(require(doc, "C", "model"), "C");
    raw.D = matrix(require(doc, "D", "model"), "D");
    if (auto it = doc.find("jumps"); it != doc.end()) {
        if (!it->is_array()) parse_fail("jumps must be an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& jj = (*it)[k];
            const std::string where = "jumps[" + std::to_string(k) + "]";
            check_keys(jj, {"from", "to", "mixture"}, where);
            RawModel::Jump jump;
            jump.from = integer(require(jj, "from", where), where + ".from");
            jump.to = integer(require(jj, "to", where), where + ".to");
            const json& mix = require(jj, "mixture", where);
            if (!mix.is_array()) parse_fail(where + ".mixture must be an array");
            for (std::size_t c = 0; c < mix.size(); ++c)
                jump.mixture.push_back(component(mix[c], where + ".mixture[" + std::to_string(c) + "]"));
            raw.jumps.push_back(std::move(jump));
        }
    }
    return raw;
}

RawModel parse_model_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(std::string("malformed JSON: ") + e.what());
    }
    return parse_model(doc);
}

RawModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) parse_fail("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str());
}

json to_json(const MapModel& model) {
    const int n = model.n();
    json j;
    j["states"] = n;
    j["v"] = std::vector<double>(model.v().data(), model.v().data() + n);
    auto rows = [&](const Matrix& m) {
        json out = json::array();
        for (int i = 0; i < n; ++i) {
            json row = json::array();
            for (int k = 0; k < n; ++k) row.push_back(m(i, k));
            out.push_back(row);
        }
        return out;
    };
    j["C"] = rows(model.C());
    j["D"] = rows(model.D());
    json jumps = json::array();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (const auto* f = model.jump(a, b)) {
                json mix = json::array();
                for (const auto& c : f->components()) mix.push_back(component_json(c));
                jumps.push_back({{"from", a}, {"to", b}, {"mixture", mix}});
            }
    j["jumps"] = jumps;
    return j;
}

bool is_builtin_model(std::string_view name) {
    return name == "cl" || name == "onoff" || name == "mixed3";
}

RawModel builtin_model(std::string_view name) {
    RawModel m;
    if (name == "cl") {
        m.states = 1;
        m.v = {-1.0};
        m.C = {{-0.5}};
        m.D = {{0.5}};
        m.jumps = {{0, 0, {{1.0, Exponential{1.0}}}}};
        return m;
    }
    if (name == "onoff") {
        m.states = 2;
        m.v = {-1.0, 1.0};
        m.C = {{-1.0, 1.0}, {2.0, -2.0}};
        m.D = {{0.0, 0.0}, {0.0, 0.0}};
        return m;
    }
    if (name == "mixed3") {
        // states 0 and 2 drain, state 1 fills; jumps of all three kinds
        m.states = 3;
        m.v = {-2.0, 0.5, -1.0};
        m.C = {{-2.0, 0.6, 0.4}, {0.8, -1.7, 0.5}, {0.3, 0.7, -1.4}};
        m.D = {{0.5, 0.3, 0.2}, {0.0, 0.0, 0.4}, {0.2, 0.0, 0.2}};
        m.jumps = {
            {0, 0, {{1.0, Exponential{1.5}}}},
            {0, 1, {{0.6, Erlang{2, 3.0}}, {0.4, Atom{0.4}}}},
            {0, 2, {{1.0, Atom{0.8}}}},
            {1, 2, {{0.5, Exponential{2.0}}, {0.5, Erlang{3, 4.0}}}},
            {2, 0, {{1.0, Erlang{2, 2.5}}}},
            {2, 2, {{0.3, Atom{0.3}}, {0.7, Exponential{1.2}}}},
        };
        return m;
    }
    parse_fail("unknown builtin model '" + std::string(name) + "'");
}

RawModel resolve_model(const std::string& path_or_name) {
    if (std::filesystem::exists(path_or_name)) return load_model_file(path_or_name);
    if (is_builtin_model(path_or_name)) return builtin_model(path_or_name);
    parse_fail("model '" + path_or_name + "' is neither a readable file nor a builtin name (cl, onoff, mixed3)");
}

}  // namespace mapruin
