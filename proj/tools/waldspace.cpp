#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wald/embedding.hpp"
#include "wald/errors.hpp"
#include "wald/forest_json.hpp"
#include "wald/gen.hpp"
#include "wald/geometry.hpp"
#include "wald/graph_forest.hpp"
#include "wald/newick.hpp"
#include "wald/spd.hpp"
#include "wald/stats.hpp"

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    return out;
}

// output goes to the file when given, otherwise to standard output
template <typename Fn>
void with_output(const std::string& path, Fn fn) {
    if (path.empty()) {
        fn(std::cout);
    } else {
        std::ofstream out = open_output(path);
        fn(out);
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument(path + ": empty matrix");
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::invalid_argument(path + ": ragged matrix rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    if (m.rows() != m.cols()) throw std::invalid_argument(path + ": matrix is not square");
    return m;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << fmt(m(i, j));
        }
        out << '\n';
    }
}

bool looks_like_json(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' || c == '[';
    }
    return false;
}

wald::Wald read_forest(const std::string& path) {
    std::string text = read_text(path);
    if (looks_like_json(text)) return wald::wald_from_json(json::parse(text));
    return wald::graph_to_splits(wald::parse_newick(text));
}

void write_forest(std::ostream& out, const wald::Wald& w, const std::string& format) {
    if (format == "newick")
        out << wald::serialize_newick(wald::splits_to_graph(w)) << '\n';
    else
        out << wald::wald_to_json(w).dump(2) << '\n';
}

std::vector<wald::Wald> read_sample(const std::string& path) {
    json doc = json::parse(read_text(path));
    if (!doc.is_array()) throw std::invalid_argument(path + ": sample must be a JSON array");
    std::vector<wald::Wald> out;
    for (const json& item : doc) out.push_back(wald::wald_from_json(item));
    return out;
}

struct Sweep {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

Sweep parse_sweep(const std::string& text) {
    Sweep s;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(text);
    if (!(in >> s.lo >> colon1 >> s.hi >> colon2 >> s.steps) || colon1 != ':' ||
        colon2 != ':' || s.steps < 1)
        throw std::invalid_argument("sweep must be lo:hi:steps");
    return s;
}

double sweep_value(const Sweep& s, int k) {
    if (s.steps == 1) return s.lo;
    return s.lo + (s.hi - s.lo) * k / (s.steps - 1);
}

wald::Split split_from_labels(int n, const std::string& side) {
    std::vector<int> a;
    std::istringstream in(side);
    std::string tok;
    while (std::getline(in, tok, ',')) a.push_back(std::stoi(tok));
    std::vector<int> b;
    for (int label = 1; label <= n; ++label)
        if (std::find(a.begin(), a.end(), label) == a.end()) b.push_back(label);
    return wald::make_split(a, b);
}

// three-leaf chart lambda = (a,a,a) used by the curvature sweep
wald::GroveChart three_leaf_chart(double a) {
    std::vector<wald::Split> splits = {wald::make_split({1}, {2, 3}),
                                       wald::make_split({2}, {1, 3}),
                                       wald::make_split({3}, {1, 2})};
    wald::WaldTopology topo(3, splits);
    return wald::GroveChart(topo, {a, a, a});
}

// corner of the one-split triangle family: leaves {j,k} joined, leaf i alone
wald::Wald triangle_corner(int i, double lam) {
    std::vector<int> jk;
    for (int label = 1; label <= 3; ++label)
        if (label != i) jk.push_back(label);
    wald::WaldTopology topo(3, {wald::make_split({jk[0]}, {jk[1]})});
    return wald::Wald(topo, {lam});
}

void print_path_csv(std::ostream& out, const wald::DiscretePath& path) {
    std::map<wald::Split, std::size_t> columns;
    for (const wald::Wald& w : path.points)
        for (const wald::Split& e : w.topology().splits()) columns.emplace(e, 0);
    std::size_t next = 0;
    for (auto& [e, idx] : columns) idx = next++;
    out << "index";
    for (const auto& [e, idx] : columns) {
        std::string name = wald::to_string(e);
        std::replace(name.begin(), name.end(), ',', '.');
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        std::vector<double> row(columns.size(), 0.0);
        const wald::Wald& w = path.points[i];
        for (std::size_t k = 0; k < w.topology().splits().size(); ++k)
            row[columns.at(w.topology().splits()[k])] = w.lambda()[k];
        out << i;
        for (double v : row) out << ',' << fmt(v);
        out << '\n';
    }
}

json path_to_json(const wald::DiscretePath& path) {
    json doc;
    doc["points"] = json::array();
    for (const wald::Wald& w : path.points) doc["points"].push_back(wald::wald_to_json(w));
    doc["energy"] = path.energy;
    doc["length"] = path.length;
    doc["warnings"] = path.warnings;
    doc["flagged"] = path.flagged;
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wald space toolkit: split forests, SPD embeddings, geodesics"};
    app.require_subcommand(1);
    app.fallthrough();
    int exit_code = 0;
    int workers = 1;
    app.add_option("--workers", workers, "worker threads for grid evaluations")
        ->default_val(1);

    std::string in_path, in_path2, out_path, format = "json";

    // validate
    auto* validate = app.add_subcommand("validate", "check a matrix against the wald conditions");
    validate->add_option("matrix", in_path, "matrix CSV (or - for stdin)")->required();
    validate->callback([&]() {
        wald::SymMatrix m(read_matrix_csv(in_path));
        wald::CheckReport rep = wald::check_wald_matrix(m);
        std::cout << "min_eigenvalue," << fmt(rep.min_eigenvalue) << '\n';
        std::cout << "r2_margin," << fmt(rep.r2_margin) << '\n';
        std::cout << "r4_margin," << fmt(rep.r4_margin) << '\n';
        for (const wald::CheckViolation& v : rep.violations) {
            std::cout << "violation," << v.condition << ',' << fmt(v.margin);
            for (int w : v.witness)
                if (w >= 0) std::cout << ',' << w;
            std::cout << '\n';
        }
        if (!rep.ok()) exit_code = 1;
    });

    // recognize
    auto* recognize = app.add_subcommand("recognize", "recover the forest of a wald matrix");
    recognize->add_option("matrix", in_path, "matrix CSV (or - for stdin)")->required();
    recognize->add_option("--output", out_path, "output file (default stdout)");
    recognize->add_option("--format", format, "json or newick")
        ->check(CLI::IsMember({"json", "newick"}));
    recognize->callback([&]() {
        wald::SpdMatrix p{wald::SymMatrix(read_matrix_csv(in_path))};
        wald::RecognizeDiagnostics diag;
        wald::Wald w = wald::recognize(p, &diag);
        with_output(out_path, [&](std::ostream& out) { write_forest(out, w, format); });
        std::cerr << "roundtrip_error=" << fmt(diag.roundtrip_error) << '\n';
        for (const wald::AmbiguousSplit& a : diag.ambiguous)
            std::cerr << "ambiguous_split=" << wald::to_string(a.split)
                      << " buneman_index=" << fmt(a.buneman_index) << '\n';
    });

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "embed a forest as a wald matrix");
    embed_cmd->add_option("forest", in_path, "forest file, JSON or Newick")->required();
    embed_cmd->add_option("--output", out_path, "output file (default stdout)");
    embed_cmd->callback([&]() {
        wald::Wald w = read_forest(in_path);
        wald::SpdMatrix p = wald::phi(w);
        with_output(out_path, [&](std::ostream& out) { write_matrix_csv(out, p.mat()); });
    });

    // convert
    auto* convert = app.add_subcommand("convert", "convert a forest between JSON and Newick");
    convert->add_option("forest", in_path, "forest file, JSON or Newick")->required();
    convert->add_option("--to", format, "target format")
        ->required()
        ->check(CLI::IsMember({"json", "newick"}));
    convert->add_option("--output", out_path, "output file (default stdout)");
    convert->callback([&]() {
        wald::Wald w = read_forest(in_path);
        with_output(out_path, [&](std::ostream& out) { write_forest(out, w, format); });
    });

    // geodesic
    wald::GeodesicParams params;
    std::string json_out;
    auto add_params = [&params](CLI::App* cmd) {
        cmd->add_option("--n0", params.n0, "initial point count (odd, >= 5)");
        cmd->add_option("--i-ext", params.i_ext, "extension rounds");
        cmd->add_option("--j-straight", params.j_straight, "straightening rounds per extension");
    };
    auto* geodesic = app.add_subcommand("geodesic", "approximate geodesic between two forests");
    geodesic->add_option("f1", in_path, "first forest")->required();
    geodesic->add_option("f2", in_path2, "second forest")->required();
    geodesic->add_option("--output", out_path, "path CSV (default stdout)");
    geodesic->add_option("--json", json_out, "also write the full path as JSON");
    add_params(geodesic);
    geodesic->callback([&]() {
        wald::Wald f1 = read_forest(in_path), f2 = read_forest(in_path2);
        wald::DiscretePath path = wald::geodesic_path(f1, f2, params);
        with_output(out_path, [&](std::ostream& out) { print_path_csv(out, path); });
        if (!json_out.empty())
            open_output(json_out) << path_to_json(path).dump(2) << '\n';
        std::cerr << "energy=" << fmt(path.energy) << " length=" << fmt(path.length) << '\n';
        for (const std::string& w : path.warnings) std::cerr << "warning: " << w << '\n';
        if (!path.flagged.empty()) {
            std::cerr << "warning: unconverged projections at indices";
            for (int i : path.flagged) std::cerr << ' ' << i;
            std::cerr << '\n';
        }
    });

    // distance
    auto* distance = app.add_subcommand("distance", "symmetrized geodesic distance");
    distance->add_option("f1", in_path, "first forest")->required();
    distance->add_option("f2", in_path2, "second forest")->required();
    add_params(distance);
    distance->callback([&]() {
        wald::Wald f1 = read_forest(in_path), f2 = read_forest(in_path2);
        wald::DistanceResult r = wald::wald_distance(f1, f2, params);
        std::cout << "distance,forward,backward,asymmetry\n";
        std::cout << fmt(r.distance) << ',' << fmt(r.forward) << ',' << fmt(r.backward)
                  << ',' << fmt(r.asymmetry) << '\n';
    });

    // curvature
    std::string sweep_text;
    auto* curvature = app.add_subcommand("curvature", "sectional curvatures of coordinate planes");
    curvature->add_option("forest", in_path, "forest file (omit when sweeping)");
    curvature->add_option("--sweep", sweep_text,
                          "three-leaf family sweep a0:a1:steps over lambda=(a,a,a)");
    curvature->add_option("--output", out_path, "output CSV (default stdout)");
    curvature->callback([&]() {
        if (!sweep_text.empty()) {
            Sweep s = parse_sweep(sweep_text);
            with_output(out_path, [&](std::ostream& out) {
                out << "a,k_01,k_02,k_12\n";
                for (int k = 0; k < s.steps; ++k) {
                    double a = sweep_value(s, k);
                    wald::GroveChart c = three_leaf_chart(a);
                    Eigen::VectorXd e0 = Eigen::VectorXd::Unit(3, 0);
                    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 1);
                    Eigen::VectorXd e2 = Eigen::VectorXd::Unit(3, 2);
                    out << fmt(a) << ',' << fmt(wald::sectional_curvature(c, e0, e1)) << ','
                        << fmt(wald::sectional_curvature(c, e0, e2)) << ','
                        << fmt(wald::sectional_curvature(c, e1, e2)) << '\n';
                }
            });
            return;
        }
        if (in_path.empty())
            throw std::invalid_argument("curvature: need a forest or --sweep");
        wald::Wald w = read_forest(in_path);
        wald::GroveChart c = wald::GroveChart::of(w);
        with_output(out_path, [&](std::ostream& out) {
            out << "i,j,k\n";
            for (int i = 0; i < c.dim(); ++i)
                for (int j = i + 1; j < c.dim(); ++j)
                    out << i << ',' << j << ','
                        << fmt(wald::sectional_curvature(c, Eigen::VectorXd::Unit(c.dim(), i),
                                                         Eigen::VectorXd::Unit(c.dim(), j)))
                        << '\n';
        });
    });

    // triangle
    auto* triangle = app.add_subcommand("triangle", "angle sums of the one-split triangle family");
    triangle->add_option("--sweep", sweep_text, "lambda sweep a0:a1:steps")->required();
    triangle->add_option("--output", out_path, "output CSV (default stdout)");
    add_params(triangle);
    triangle->callback([&]() {
        Sweep s = parse_sweep(sweep_text);
        with_output(out_path, [&](std::ostream& out) {
            out << "lambda,angle_sum_degrees\n";
            for (int k = 0; k < s.steps; ++k) {
                double a = sweep_value(s, k);
                double sum = wald::triangle_angle_sum(triangle_corner(1, a),
                                                      triangle_corner(2, a),
                                                      triangle_corner(3, a), params);
                out << fmt(a) << ',' << fmt(sum) << '\n';
            }
        });
    });

    // frechet-mean
    std::string interior_side = "1,2", heatmap_path;
    wald::FrechetConfig cfg;
    auto* frechet = app.add_subcommand("frechet-mean", "two-stage Fréchet mean search");
    frechet->add_option("sample", in_path, "JSON array of forests")->required();
    frechet->add_option("--interior", interior_side,
                        "comma-separated labels of one side of the family's interior split");
    frechet->add_option("--pen", sweep_text, "pendant grid lo:hi:steps");
    std::string inter_text;
    frechet->add_option("--inter", inter_text, "interior grid lo:hi:steps");
    frechet->add_option("--grid-n0", cfg.grid_params.n0, "grid stage n0");
    frechet->add_option("--grid-i-ext", cfg.grid_params.i_ext, "grid stage extensions");
    frechet->add_option("--grid-j-straight", cfg.grid_params.j_straight,
                        "grid stage straightenings");
    frechet->add_option("--refine-n0", cfg.refine_params.n0, "refine stage n0");
    frechet->add_option("--refine-i-ext", cfg.refine_params.i_ext, "refine stage extensions");
    frechet->add_option("--refine-j-straight", cfg.refine_params.j_straight,
                        "refine stage straightenings");
    frechet->add_option("--refine-iters", cfg.refine_iters, "simplex iterations");
    frechet->add_option("--heatmap", heatmap_path, "write the family grid values as CSV");
    frechet->add_option("--output", out_path, "result JSON (default stdout)");
    frechet->callback([&]() {
        std::vector<wald::Wald> forests = read_sample(in_path);
        wald::Sample sample(std::move(forests));
        cfg.interior = split_from_labels(sample.n_leaves(), interior_side);
        if (!sweep_text.empty()) {
            Sweep s = parse_sweep(sweep_text);
            cfg.pen_lo = s.lo;
            cfg.pen_hi = s.hi;
            cfg.pen_steps = s.steps;
        }
        if (!inter_text.empty()) {
            Sweep s = parse_sweep(inter_text);
            cfg.inter_lo = s.lo;
            cfg.inter_hi = s.hi;
            cfg.inter_steps = s.steps;
        }
        cfg.workers = workers;
        wald::FrechetResult r = wald::frechet_mean(sample, cfg);
        if (!heatmap_path.empty()) {
            std::ofstream out = open_output(heatmap_path);
            out << "lambda_pen,lambda_int,frechet_value\n";
            for (const wald::HeatmapCell& cell : r.heatmap)
                out << fmt(cell.pen) << ',' << fmt(cell.inter) << ',' << fmt(cell.value)
                    << '\n';
        }
        json doc;
        doc["mean"] = wald::wald_to_json(r.mean);
        doc["value"] = r.value;
        doc["pen"] = r.pen;
        doc["inter"] = r.inter;
        doc["sticks"] = r.sticks;
        with_output(out_path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    });

    // contract
    double contract_x = 0.0;
    auto* contract = app.add_subcommand("contract", "pull a forest toward the disconnected forest");
    contract->add_option("forest", in_path, "forest file")->required();
    contract->add_option("--x", contract_x, "contraction parameter in [0,1]")->required();
    contract->add_option("--format", format, "json or newick")
        ->check(CLI::IsMember({"json", "newick"}));
    contract->add_option("--output", out_path, "output file (default stdout)");
    contract->callback([&]() {
        wald::Wald w = read_forest(in_path);
        wald::Wald c = wald::contract_toward_infinity(w, contract_x);
        with_output(out_path, [&](std::ostream& out) { write_forest(out, c, format); });
    });

    // gen
    int gen_n = 5, gen_count = 1;
    std::uint64_t gen_seed = 0;
    std::string violate;
    wald::GenOptions gopts;
    auto* gen = app.add_subcommand("gen", "seeded random forests and counterexample matrices");
    gen->add_option("--n", gen_n, "leaf count")->required();
    gen->add_option("--seed", gen_seed, "RNG seed")->default_val(0);
    gen->add_option("--count", gen_count, "number of forests")->default_val(1);
    gen->add_option("--block-prob", gopts.block_prob, "chance a leaf starts a new block");
    gen->add_option("--drop-prob", gopts.drop_prob, "chance to contract a droppable split");
    gen->add_option("--violate", violate, "emit a matrix violating R2, R3 or R4 instead")
        ->check(CLI::IsMember({"R2", "R3", "R4"}));
    gen->add_option("--format", format, "json or newick")
        ->check(CLI::IsMember({"json", "newick"}));
    gen->add_option("--output", out_path, "output file (default stdout)");
    gen->callback([&]() {
        wald::Rng rng(gen_seed);
        if (!violate.empty()) {
            wald::SymMatrix m = wald::violating_matrix(gen_n, rng, violate);
            with_output(out_path, [&](std::ostream& out) { write_matrix_csv(out, m.mat()); });
            return;
        }
        with_output(out_path, [&](std::ostream& out) {
            if (format == "newick") {
                for (int k = 0; k < gen_count; ++k)
                    write_forest(out, wald::random_wald(gen_n, rng, gopts), format);
            } else if (gen_count == 1) {
                write_forest(out, wald::random_wald(gen_n, rng, gopts), format);
            } else {
                json arr = json::array();
                for (int k = 0; k < gen_count; ++k)
                    arr.push_back(wald::wald_to_json(wald::random_wald(gen_n, rng, gopts)));
                out << arr.dump(2) << '\n';
            }
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const wald::WaldError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}
