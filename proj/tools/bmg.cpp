#include "CLI11.hpp"
#include "bmg/analysis.hpp"
#include "bmg/bm.hpp"
#include "bmg/builders.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace bmg;

static const char* kVersion = "bmg 1.0.0";

namespace {

std::vector<int> parse_word(const std::string& s) {
    std::vector<int> out;
    if (s == "e" || s.empty()) return out; // identity
    std::istringstream is(s);
    int v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw refusal_error("cannot parse word '" + s + "': expected integers");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    if (s.empty()) return out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        try {
            size_t pos = 0;
            int v = std::stoi(cur, &pos);
            if (pos != cur.size()) throw std::invalid_argument("");
            out.push_back(v);
        } catch (...) {
            throw refusal_error("cannot parse integer list '" + s + "'");
        }
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    return out;
}

int vertex_or_refuse(const MomentGraph& g, const std::string& id) {
    int v = g.vertex_index(id);
    if (v < 0) throw refusal_error("unknown vertex '" + id + "'");
    return v;
}

fs::path cache_dir() {
    if (const char* env = std::getenv("BMG_CACHE_DIR")) return fs::path(env);
    if (const char* home = std::getenv("HOME")) return fs::path(home) / ".cache" / "bmg";
    return fs::path(".bmg-cache");
}

// Emit the primary output: to the file (exact bytes = content) plus a run
// manifest, or to stdout when no output path was given.
void deliver(const std::string& content, const std::string& out_path,
             const std::string& subcommand, const json& args, const json& input_hashes) {
    if (out_path.empty()) {
        std::cout << content << "\n";
        return;
    }
    write_file(out_path, content);
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["arguments"] = args;
    manifest["input_hashes"] = input_hashes;
    manifest["tool_version"] = kVersion;
    manifest["output_hash"] = sha256_hex(content);
    write_file(out_path + ".manifest.json", canonical_dump(manifest));
}

json weight_json(const Weight& w) {
    json a = json::array();
    for (long v : w) a.push_back(v);
    return a;
}

struct Opts {
    std::string type, cartan, top, cutoff, parabolic, graph, out, coeff, window, sheaf,
        open_ids, method, lambda, prime;
    int jobs = 1;
    bool no_cache = false, force = false, as_json = false;
    std::optional<int> l;
};

void run_build(const Opts& o) {
    MomentGraph g;
    json args{{"type", o.type}};
    json inputs = json::object();
    if (o.type == "finite") {
        if (o.cartan.empty() || o.top.empty())
            throw refusal_error("build --type finite requires --cartan and --top");
        CartanMatrix A = CartanMatrix::from_type(o.cartan);
        g = finite_bruhat_graph(A, parse_word(o.top), parse_int_list(o.parabolic));
        args["cartan"] = o.cartan;
        args["top"] = o.top;
        if (!o.parabolic.empty()) args["parabolic"] = o.parabolic;
    } else if (o.type == "affine-gr") {
        if (o.cartan.empty() || o.cutoff.empty())
            throw refusal_error("build --type affine-gr requires --cartan and --cutoff");
        CartanMatrix A = CartanMatrix::from_type(o.cartan);
        g = affine_grassmannian_graph(A, std::stol(o.cutoff));
        args["cartan"] = o.cartan;
        args["cutoff"] = o.cutoff;
    } else if (o.type == "file") {
        if (o.graph.empty()) throw refusal_error("build --type file requires --graph");
        std::string raw = read_file(o.graph);
        inputs["graph"] = sha256_hex(raw);
        g = graph_from_json(json::parse(raw));
        args["graph"] = o.graph;
    } else {
        throw refusal_error("unknown build type '" + o.type + "' (finite | affine-gr | file)");
    }
    if (o.out.empty()) throw refusal_error("build requires --out");
    std::string content = canonical_dump(graph_to_json(g));
    deliver(content, o.out, "build", args, inputs);
    json summary{{"vertices", g.n()}, {"edges", g.edges.size()}, {"out", o.out}};
    std::cout << canonical_dump(summary) << "\n";
}

void run_gkm(const Opts& o) {
    std::string raw = read_file(o.graph);
    MomentGraph g = graph_from_json(json::parse(raw));
    CoeffSpec k = CoeffSpec::parse(o.coeff);
    GkmReport r = g.gkm_check(k);
    json out;
    out["coeff"] = k.str();
    out["pass"] = r.pass();
    json zl = json::array();
    for (int ei : r.zero_label_edges)
        zl.push_back(json{{"tail", g.ids[g.edges[ei].tail]},
                          {"head", g.ids[g.edges[ei].head]},
                          {"label", weight_json(g.edges[ei].label)}});
    out["zero_label_edges"] = zl;
    json dp = json::array();
    for (const auto& [v, e1, e2] : r.dependent_pairs)
        dp.push_back(json{{"vertex", g.ids[v]},
                          {"labels", json::array({weight_json(g.edges[e1].label),
                                                  weight_json(g.edges[e2].label)})}});
    out["dependent_pairs"] = dp;
    std::cout << canonical_dump(out) << "\n";
}

void run_bm(const Opts& o) {
    std::string raw = read_file(o.graph);
    MomentGraph g = graph_from_json(json::parse(raw));
    CoeffSpec k = CoeffSpec::parse(o.coeff);
    int top = vertex_or_refuse(g, o.top);
    int lo = 0, hi = 0;
    if (o.window.empty()) {
        hi = 2 * default_duality_degree(g, top) + 4;
    } else {
        std::vector<int> w = parse_int_list(o.window);
        if (w.size() != 2) throw refusal_error("--window expects 'lo,hi'");
        lo = w[0];
        hi = w[1];
    }
    json args{{"graph", o.graph}, {"coeff", k.str()}, {"top", o.top},
              {"window", json::array({lo, hi})}};
    json inputs{{"graph", sha256_hex(raw)}};
    const std::string key = sha256_hex(canonical_dump(json{{"graph", graph_to_json(g)},
                                                           {"coeff", k.str()},
                                                           {"top", o.top},
                                                           {"window", json::array({lo, hi})}}));
    fs::path cdir = cache_dir();
    fs::path cfile = cdir / (key + ".json");
    std::string content;
    if (!o.no_cache && fs::exists(cfile)) {
        content = read_file(cfile.string());
        std::cerr << "cache hit " << key << "\n";
    } else {
        BMOptions bopt;
        bopt.jobs = o.jobs;
        BMSheaf S = braden_macpherson(g, k, top, lo, hi, bopt);
        content = canonical_dump(sheaf_to_json(S));
        if (!o.no_cache) {
            std::error_code ec;
            fs::create_directories(cdir, ec);
            if (!ec) write_file(cfile.string(), content);
            std::cerr << "cache miss " << key << "\n";
        }
    }
    deliver(content, o.out, "bm", args, inputs);
}

void run_sections(const Opts& o) {
    std::string raw = read_file(o.sheaf);
    BMSheaf S = sheaf_from_json(json::parse(raw));
    std::vector<int> open;
    for (const std::string& id : split_commas(o.open_ids))
        open.push_back(vertex_or_refuse(S.graph, id));
    SectionSpace sec = sections(S, open, false);
    std::vector<int> gens = section_generator_degrees(S, open);
    json out;
    json ids = json::array();
    for (int v : sec.verts) ids.push_back(S.graph.ids[v]);
    out["open"] = ids;
    json dims = json::object();
    for (int d = S.lo; d <= S.hi; ++d) dims[std::to_string(d)] = sec.mod.dims[d - S.lo];
    out["dims"] = dims;
    out["generator_degrees"] = gens;
    std::cout << canonical_dump(out) << "\n";
}

void run_smooth(const Opts& o) {
    std::string raw = read_file(o.graph);
    MomentGraph g = graph_from_json(json::parse(raw));
    CoeffSpec k = CoeffSpec::parse(o.coeff);
    int top = vertex_or_refuse(g, o.top);
    SmoothMethod m;
    if (o.method == "stalks") m = SmoothMethod::Stalks;
    else if (o.method == "edges") m = SmoothMethod::Edges;
    else if (o.method == "compare") m = SmoothMethod::Compare;
    else throw refusal_error("unknown method '" + o.method + "' (stalks | edges | compare)");
    SmoothLocusReport r = smooth_locus(g, k, top, m, o.l);
    json out;
    out["method"] = o.method;
    out["coeff"] = k.str();
    out["top"] = o.top;
    out["l"] = r.l;
    auto names = [&](const std::vector<int>& vs) {
        json a = json::array();
        for (int v : vs) a.push_back(g.ids[v]);
        return a;
    };
    if (m != SmoothMethod::Edges) out["stalk_set"] = names(r.stalk_set);
    if (m != SmoothMethod::Stalks) out["edge_set"] = names(r.edge_set);
    if (m == SmoothMethod::Compare) out["symmetric_difference"] = names(r.symmetric_difference);
    out["smooth"] = names(r.primary());
    std::string content = canonical_dump(out);
    json args{{"graph", o.graph}, {"coeff", k.str()}, {"top", o.top},
              {"method", o.method}, {"l", r.l}};
    deliver(content, o.out, "smooth", args, json{{"graph", sha256_hex(raw)}});
    if (!o.out.empty()) std::cout << content << "\n";
}

void run_kl(const Opts& o) {
    CartanMatrix A = CartanMatrix::from_type(o.cartan);
    KLTable t = kl_table(A, parse_word(o.top));
    if (o.as_json) {
        json rows = json::object();
        for (const auto& [id, p] : t.rows) rows[id] = qpoly_str(p);
        std::cout << canonical_dump(json{{"top", t.top_id}, {"rows", rows}}) << "\n";
        return;
    }
    for (const auto& [id, p] : t.rows) std::cout << id << "\t" << qpoly_str(p) << "\n";
}

void run_tilt(const Opts& o) {
    CartanMatrix A = CartanMatrix::from_type(o.cartan);
    std::vector<long> lambda;
    for (int v : parse_int_list(o.lambda)) lambda.push_back(v);
    uint64_t p = 0;
    try {
        size_t pos = 0;
        p = std::stoull(o.prime, &pos);
        if (pos != o.prime.size()) throw std::invalid_argument("");
    } catch (...) {
        throw refusal_error("cannot parse prime '" + o.prime + "'");
    }
    CharacterTable t = tilting_character(A, lambda, p, o.force);
    if (o.as_json) {
        json rows = json::object();
        for (const auto& [w, m] : t.rows) rows[AffinePoints::id_of(w)] = m;
        std::cout << canonical_dump(json{{"lambda", t.lambda}, {"p", t.p}, {"rows", rows}})
                  << "\n";
        return;
    }
    for (const auto& [w, m] : t.rows)
        std::cout << AffinePoints::id_of(w) << "\t" << m << "\n";
}

void run_verify(const Opts& o) {
    BMSheaf S = sheaf_from_json(json::parse(read_file(o.sheaf)));
    AxiomReport r = verify_bm_axioms(S);
    if (!r.ok) {
        json err{{"error", r.str()}, {"axiom", r.axiom}, {"location", r.location},
                 {"detail", r.detail}};
        std::cerr << canonical_dump(err) << "\n";
        std::exit(1);
    }
    std::cout << canonical_dump(json{{"ok", true}}) << "\n";
}

void run_decompose(const Opts& o) {
    BMSheaf S = sheaf_from_json(json::parse(read_file(o.sheaf)));
    AxiomReport r = verify_bm_axioms(S);
    if (!r.ok) throw refusal_error("decompose requires a verified sheaf: " + r.str());
    std::vector<Summand> parts = decompose(S);
    json out = json::array();
    for (const auto& s : parts)
        out.push_back(json{{"vertex", S.graph.ids[s.vertex]},
                           {"shift", s.shift},
                           {"multiplicity", s.multiplicity}});
    std::cout << canonical_dump(out) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact sheaf computations on moment graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Opts o;
    std::function<void()> action;

    CLI::App* build = app.add_subcommand("build", "Construct a moment graph and write it to a file");
    build->add_option("--type", o.type, "finite | affine-gr | file")->required();
    build->add_option("--cartan", o.cartan, "Cartan type, e.g. A3");
    build->add_option("--top", o.top, "word of the top element, e.g. \"1 2 1\"");
    build->add_option("--cutoff", o.cutoff, "length cutoff for affine-gr");
    build->add_option("--parabolic", o.parabolic, "comma-separated simple reflections, e.g. 1,3");
    build->add_option("--graph", o.graph, "input graph file (type=file)");
    build->add_option("--out", o.out, "output graph file");
    build->callback([&] { action = [&] { run_build(o); }; });

    CLI::App* gkm = app.add_subcommand("gkm", "Check the label-independence condition");
    gkm->add_option("--graph", o.graph)->required();
    gkm->add_option("--coeff", o.coeff, "Q | Fp:<prime> | Zp:<prime>")->required();
    gkm->callback([&] { action = [&] { run_gkm(o); }; });

    CLI::App* bm = app.add_subcommand("bm", "Run the sheaf construction");
    bm->add_option("--graph", o.graph)->required();
    bm->add_option("--coeff", o.coeff, "Q | Fp:<prime> | Zp:<prime>")->required();
    bm->add_option("--top", o.top, "top vertex id")->required();
    bm->add_option("--window", o.window, "degree window 'lo,hi' (default 0,2l+4)");
    bm->add_option("--out", o.out, "output sheaf file (default: stdout)");
    bm->add_option("--jobs", o.jobs, "worker threads for incomparable vertices");
    bm->add_flag("--no-cache", o.no_cache, "bypass the content-addressed cache");
    bm->callback([&] { action = [&] { run_bm(o); }; });

    CLI::App* sec = app.add_subcommand("sections", "Sections of a sheaf over an up-closed set");
    sec->add_option("--sheaf", o.sheaf)->required();
    sec->add_option("--open", o.open_ids, "comma-separated vertex ids (empty set allowed)");
    sec->callback([&] { action = [&] { run_sections(o); }; });

    CLI::App* smooth = app.add_subcommand("smooth", "Rank-one locus of a sheaf");
    smooth->add_option("--graph", o.graph)->required();
    smooth->add_option("--coeff", o.coeff)->required();
    smooth->add_option("--top", o.top, "top vertex id")->required();
    smooth->add_option("--method", o.method, "stalks | edges | compare")->required();
    int l_val = 0;
    CLI::Option* lopt = smooth->add_option("--l", l_val, "duality degree (default: longest path)");
    smooth->add_option("--out", o.out, "output report file");
    smooth->callback([&] {
        if (*lopt) o.l = l_val;
        action = [&] { run_smooth(o); };
    });

    CLI::App* kl = app.add_subcommand("kl", "Recursion table for an interval");
    kl->add_option("--cartan", o.cartan)->required();
    kl->add_option("--top", o.top, "word of the top element")->required();
    kl->add_flag("--json", o.as_json, "emit JSON instead of TSV");
    kl->callback([&] { action = [&] { run_kl(o); }; });

    CLI::App* tilt = app.add_subcommand("tilt", "Character table from the affine graph");
    tilt->add_option("--cartan", o.cartan)->required();
    tilt->add_option("--p", o.prime, "prime")->required();
    tilt->add_option("--lambda", o.lambda, "dominant weight, comma-separated coordinates")->required();
    tilt->add_flag("--force", o.force, "override the p > h+1 requirement");
    tilt->add_flag("--json", o.as_json, "emit JSON instead of TSV");
    tilt->callback([&] { action = [&] { run_tilt(o); }; });

    CLI::App* verify = app.add_subcommand("verify", "Check the sheaf axioms on a file");
    verify->add_option("--sheaf", o.sheaf)->required();
    verify->callback([&] { action = [&] { run_verify(o); }; });

    CLI::App* dec = app.add_subcommand("decompose", "Split into shifted indecomposables");
    dec->add_option("--sheaf", o.sheaf)->required();
    dec->callback([&] { action = [&] { run_decompose(o); }; });

    try {
        app.parse(argc, argv);
        if (action) action();
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    } catch (const refusal_error& e) {
        std::cerr << canonical_dump(json{{"error", e.what()}}) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << canonical_dump(json{{"internal_error", e.what()}}) << "\n";
        return 2;
    }
}
