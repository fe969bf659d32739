#include "wald/newick.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include "wald/errors.hpp"

namespace wald {

double length_to_weight(double l) {
    if (!(l > 0.0) || !std::isfinite(l))
        throw DomainError("branch length must be finite and positive");
    return -std::expm1(-l);
}

double weight_to_length(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainError("edge weight must lie strictly between 0 and 1");
    return -std::log1p(-lambda);
}

std::vector<double> lengths_to_weights(const std::vector<double>& l) {
    std::vector<double> out;
    out.reserve(l.size());
    for (double x : l) out.push_back(length_to_weight(x));
    return out;
}

std::vector<double> weights_to_lengths(const std::vector<double>& lambda) {
    std::vector<double> out;
    out.reserve(lambda.size());
    for (double x : lambda) out.push_back(weight_to_length(x));
    return out;
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    ForestGraph g;
    std::map<int, int> label_vertex;  // label -> vertex id

    explicit Parser(const std::string& text) : s(text) { g.n_vertices = 0; }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eof() const { return pos >= s.size(); }

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos, what); }

    int new_vertex() {
        g.label.push_back(0);
        return g.n_vertices++;
    }

    void attach_label(int v, int label) {
        if (label <= 0 || label > max_leaves) fail("leaf label out of range 1..64");
        auto [it, fresh] = label_vertex.emplace(label, v);
        if (!fresh) throw DuplicateLabel(label);
        g.label[v] = label;
    }

    std::string edge_name(int child) const {
        if (g.label[child] > 0) return std::to_string(g.label[child]);
        return "#" + std::to_string(child);
    }

    // bare name token: everything up to a structural character
    std::string parse_name() {
        std::size_t start = pos;
        while (pos < s.size()) {
            char c = s[pos];
            if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            ++pos;
        }
        return s.substr(start, pos - start);
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size()) {
            char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' ||
                c == 'E' || c == '+' || c == '-')
                ++pos;
            else
                break;
        }
        if (pos == start) fail("expected branch length");
        const std::string tok = s.substr(start, pos - start);
        try {
            std::size_t used = 0;
            double x = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("trailing junk");
            return x;
        } catch (const std::exception&) {
            pos = start;
            fail("malformed number");
        }
    }

    int parse_subtree(bool at_root) {
        skip_ws();
        if (eof()) fail("unexpected end of input");
        if (s[pos] == '(') {
            ++pos;
            int v = new_vertex();
            int n_children = 0;
            while (true) {
                int c = parse_subtree(false);
                skip_ws();
                if (eof() || s[pos] != ':') throw MissingLength(edge_name(c));
                ++pos;
                double len = parse_number();
                if (!(len > 0.0) || !std::isfinite(len))
                    throw NonPositiveLength(edge_name(c));
                g.edges.push_back({v, c, len});
                ++n_children;
                skip_ws();
                if (!eof() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                break;
            }
            skip_ws();
            if (eof() || s[pos] != ')') fail("expected ')' or ','");
            ++pos;
            skip_ws();
            std::string name = parse_name();
            if (all_digits(name)) attach_label(v, std::atoi(name.c_str()));
            int degree = n_children + (at_root ? 0 : 1);
            if (g.label[v] == 0 && degree < 3 && !(at_root && degree == 2))
                throw DegreeTwoVertex(v);
            return v;
        }
        std::string name = parse_name();
        if (name.empty()) fail("expected leaf label or '('");
        if (!all_digits(name)) fail("leaf label must be a positive integer");
        int v = new_vertex();
        attach_label(v, std::atoi(name.c_str()));
        return v;
    }
};

// sorted adjacency with edge lengths for the serializer
struct Adj {
    std::vector<std::vector<std::pair<int, double>>> nb;
    explicit Adj(const ForestGraph& f) : nb(f.n_vertices) {
        for (const auto& e : f.edges) {
            nb[e.u].push_back({e.v, e.length});
            nb[e.v].push_back({e.u, e.length});
        }
    }
};

std::string format_double(double x) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

struct Written {
    std::string text;
    int min_label;
};

struct Writer {
    const ForestGraph& f;
    const Adj& adj;

    Written write(int v, int parent) const {
        // collect children, suppressing unlabeled pass-through vertices
        struct Child {
            int vertex;
            int via;  // predecessor of vertex on the walked-over path
            double length;
        };
        std::vector<Child> children;
        for (const auto& [nb0, len0] : adj.nb[v]) {
            if (nb0 == parent) continue;
            int prev = v, cur = nb0;
            double len = len0;
            while (f.label[cur] == 0 && adj.nb[cur].size() == 2) {
                const auto& two = adj.nb[cur];
                auto [nxt, l2] = two[0].first == prev ? two[1] : two[0];
                len += l2;
                prev = cur;
                cur = nxt;
            }
            children.push_back({cur, prev, len});
        }
        if (children.empty()) {
            if (f.label[v] <= 0)
                throw std::invalid_argument("serialize_newick: unlabeled leaf vertex");
            return {std::to_string(f.label[v]), f.label[v]};
        }
        std::vector<std::pair<Written, double>> parts;
        for (const auto& c : children) parts.push_back({write(c.vertex, c.via), c.length});
        std::sort(parts.begin(), parts.end(),
                  [](const auto& a, const auto& b) { return a.first.min_label < b.first.min_label; });
        std::string out = "(";
        int min_label = f.label[v] > 0 ? f.label[v] : max_leaves + 1;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) out += ',';
            out += parts[i].first.text;
            out += ':';
            out += format_double(parts[i].second);
            min_label = std::min(min_label, parts[i].first.min_label);
        }
        out += ')';
        if (f.label[v] > 0) out += std::to_string(f.label[v]);
        return {out, min_label};
    }
};

}  // namespace

ForestGraph parse_newick(const std::string& text) {
    Parser p(text);
    p.skip_ws();
    if (p.eof()) p.fail("empty input");
    while (!p.eof()) {
        p.parse_subtree(true);
        p.skip_ws();
        if (p.eof() || p.s[p.pos] != ';') p.fail("expected ';'");
        ++p.pos;
        p.skip_ws();
    }
    // labels must cover 1..N exactly
    if (p.label_vertex.empty()) p.fail("no leaf labels");
    int n = p.label_vertex.rbegin()->first;
    if (n < 2 || n > max_leaves)
        throw std::invalid_argument("parse_newick: need between 2 and 64 leaf labels");
    if (static_cast<int>(p.label_vertex.size()) != n)
        throw std::invalid_argument("parse_newick: leaf labels must cover 1..N without gaps");
    return std::move(p.g);
}

std::string serialize_newick(const ForestGraph& f) {
    if (static_cast<int>(f.label.size()) != f.n_vertices)
        throw std::invalid_argument("serialize_newick: label vector size mismatch");
    Adj adj(f);
    // components, each keyed by its smallest label
    std::vector<int> comp(f.n_vertices, -1);
    std::vector<std::pair<int, int>> roots;  // (smallest label, root vertex)
    for (int v0 = 0; v0 < f.n_vertices; ++v0) {
        if (comp[v0] >= 0) continue;
        std::vector<int> stack{v0}, verts;
        comp[v0] = v0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            verts.push_back(v);
            for (const auto& [nb, len] : adj.nb[v]) {
                (void)len;
                if (comp[nb] < 0) {
                    comp[nb] = v0;
                    stack.push_back(nb);
                }
            }
        }
        int best = -1;
        for (int v : verts)
            if (f.label[v] > 0 && (best < 0 || f.label[v] < f.label[best])) best = v;
        if (best < 0) throw std::invalid_argument("serialize_newick: component without labels");
        int root = adj.nb[best].size() == 1 ? adj.nb[best][0].first : best;
        roots.push_back({f.label[best], root});
    }
    std::sort(roots.begin(), roots.end());
    Writer w{f, adj};
    std::string out;
    for (const auto& [lab, root] : roots) {
        (void)lab;
        out += w.write(root, -1).text;
        out += ';';
    }
    return out;
}

}  // namespace wald
