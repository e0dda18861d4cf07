#include "shrg/json_io.hpp"

#include <fstream>
#include <sstream>

#include "shrg/error.hpp"

namespace shrg {

namespace {

const Json &field(const Json &j, const char *key, const char *what) {
    if (!j.is_object())
        throw ValidationError(std::string(what) + " must be a JSON object");
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(std::string(what) + " is missing \"" + key + "\"");
    return *it;
}

std::string str(const Json &j, const char *key, const char *what) {
    const auto &v = field(j, key, what);
    if (!v.is_string())
        throw ValidationError(std::string(what) + " field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

const Json &array(const Json &j, const char *key, const char *what) {
    const auto &v = field(j, key, what);
    if (!v.is_array())
        throw ValidationError(std::string(what) + " field \"" + key + "\" must be an array");
    return v;
}

std::vector<NodeId> id_list(const Json &j, const char *key, const char *what) {
    std::vector<NodeId> out;
    for (const auto &x : array(j, key, what)) {
        if (!x.is_string())
            throw ValidationError(std::string(what) + " field \"" + key + "\" must hold strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

void graph_fields(const SemGraph &g, Json &j) {
    j["top"] = g.top ? Json(*g.top) : Json(nullptr);
    Json nodes = Json::array();
    for (const auto &n : g.nodes) {
        Json jn;
        jn["id"] = n.id;
        jn["label"] = n.label;
        jn["anchor"] = n.anchor ? Json::array({n.anchor->start, n.anchor->end}) : Json(nullptr);
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    Json edges = Json::array();
    for (const auto &e : g.edges)
        edges.push_back(Json{{"src", e.src}, {"role", e.role}, {"tgt", e.tgt}});
    j["edges"] = std::move(edges);
}

SemGraph read_graph(const Json &j) {
    SemGraph g;
    const auto &top = field(j, "top", "graph");
    if (top.is_string())
        g.top = top.get<std::string>();
    else if (!top.is_null())
        throw ValidationError("graph field \"top\" must be a string or null");
    for (const auto &jn : array(j, "nodes", "graph")) {
        SemNode n{str(jn, "id", "node"), str(jn, "label", "node"), std::nullopt};
        if (auto it = jn.find("anchor"); it != jn.end() && !it->is_null()) {
            if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer())
                throw ValidationError("node " + n.id + ": anchor must be [start, end]");
            n.anchor = Anchor{(*it)[0].get<int>(), (*it)[1].get<int>()};
        }
        g.nodes.push_back(std::move(n));
    }
    for (const auto &je : array(j, "edges", "graph"))
        g.edges.push_back(SemEdge{str(je, "src", "edge"), str(je, "role", "edge"), str(je, "tgt", "edge")});
    return g;
}

} // namespace

Json to_json(const SemGraph &g) {
    Json j = Json::object();
    graph_fields(g, j);
    return j;
}

Json to_json(const GraphFragment &f) {
    Json j = Json::object();
    graph_fields(f.graph, j);
    j["externals"] = f.externals;
    Json nts = Json::array();
    for (const auto &e : f.nt_edges)
        nts.push_back(Json{{"label", e.label}, {"attachments", e.attachments}});
    j["nt_edges"] = std::move(nts);
    return j;
}

Json to_json(const SyncRule &r) {
    Json j = Json::object();
    j["id"] = r.id;
    j["lhs"] = r.lhs;
    Json rhs = Json::array();
    for (const auto &s : r.syn_rhs)
        rhs.push_back(Json{{s.is_nonterminal() ? "nt" : "t", s.name}});
    j["syn_rhs"] = std::move(rhs);
    j["sem"] = to_json(r.sem);
    j["count"] = r.count;
    return j;
}

Json to_json(const RuleInventory &inv) {
    Json rules = Json::array();
    for (const auto &r : inv.rules())
        rules.push_back(to_json(r));
    Json j = Json::object();
    j["mode"] = to_string(inv.mode());
    j["rules"] = std::move(rules);
    return j;
}

Json to_json(const Derivation &d) {
    Json children = Json::array();
    for (const auto &c : d.children)
        children.push_back(to_json(c));
    Json j = Json::object();
    j["rule"] = d.rule_id;
    j["children"] = std::move(children);
    return j;
}

SemGraph graph_from_json(const Json &j) {
    SemGraph g = read_graph(j);
    validate(g);
    return g;
}

GraphFragment fragment_from_json(const Json &j) {
    GraphFragment f;
    f.graph = read_graph(j);
    if (j.contains("externals"))
        f.externals = id_list(j, "externals", "fragment");
    if (j.contains("nt_edges"))
        for (const auto &je : array(j, "nt_edges", "fragment"))
            f.nt_edges.push_back(NtEdge{str(je, "label", "nt_edge"), id_list(je, "attachments", "nt_edge")});
    validate(f);
    return f;
}

SyncRule rule_from_json(const Json &j) {
    SyncRule r;
    r.id = str(j, "id", "rule");
    r.lhs = str(j, "lhs", "rule");
    for (const auto &s : array(j, "syn_rhs", "rule")) {
        if (s.is_object() && s.size() == 1 && s.contains("nt") && s["nt"].is_string())
            r.syn_rhs.push_back(Symbol::nt(s["nt"].get<std::string>()));
        else if (s.is_object() && s.size() == 1 && s.contains("t") && s["t"].is_string())
            r.syn_rhs.push_back(Symbol::t(s["t"].get<std::string>()));
        else
            throw ValidationError("rule " + r.id + ": syn_rhs entries must be {\"nt\": str} or {\"t\": str}");
    }
    try {
        r.sem = fragment_from_json(field(j, "sem", "rule"));
    } catch (const ValidationError &e) {
        throw ValidationError("rule " + r.id + ": " + e.what());
    }
    if (auto it = j.find("count"); it != j.end()) {
        if (!it->is_number_integer())
            throw ValidationError("rule " + r.id + ": count must be an integer");
        r.count = it->get<std::int64_t>();
    }
    validate(r);
    return r;
}

RuleInventory inventory_from_json(const Json &j) {
    SignatureMode mode = SignatureMode::kDelexicalized;
    if (auto it = j.find("mode"); it != j.end()) {
        if (!it->is_string())
            throw ValidationError("inventory mode must be a string");
        mode = parse_signature_mode(it->get<std::string>());
    }
    std::vector<SyncRule> rules;
    for (const auto &jr : array(j, "rules", "inventory"))
        rules.push_back(rule_from_json(jr));
    return RuleInventory(std::move(rules), mode);
}

Derivation derivation_from_json(const Json &j) {
    Derivation d;
    d.rule_id = str(j, "rule", "derivation node");
    if (j.contains("children"))
        for (const auto &c : array(j, "children", "derivation node"))
            d.children.push_back(derivation_from_json(c));
    return d;
}

std::string dump(const Json &j) { return j.dump(-1, ' ', false, Json::error_handler_t::strict); }

Json parse_json(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("error reading " + path.string());
    return ss.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("error writing " + path.string());
}

Json read_json(const std::filesystem::path &path) {
    try {
        return parse_json(read_text(path));
    } catch (const ParseError &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace shrg
