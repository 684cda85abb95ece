// Compares the serial vertex schedule against the antichain-parallel one on a
// family of graphs, checking that both produce identical content hashes.
#include "bmg/analysis.hpp"
#include "bmg/bm.hpp"
#include "bmg/builders.hpp"

#include <chrono>
#include <iostream>

using namespace bmg;

namespace {

double run_once(const MomentGraph& g, const CoeffSpec& k, int top, int hi, int jobs,
                std::string& hash) {
    BMOptions opt;
    opt.jobs = jobs;
    auto t0 = std::chrono::steady_clock::now();
    BMSheaf S = braden_macpherson(g, k, top, 0, hi, opt);
    auto t1 = std::chrono::steady_clock::now();
    hash = sheaf_content_hash(S);
    return std::chrono::duration<double>(t1 - t0).count();
}

int bench_case(const std::string& name, const MomentGraph& g, const CoeffSpec& k,
               const std::string& top_id, int jobs) {
    int top = g.vertex_index(top_id);
    int hi = 2 * default_duality_degree(g, top) + 4;
    std::string h1, hn;
    double serial = run_once(g, k, top, hi, 1, h1);
    double par = run_once(g, k, top, hi, jobs, hn);
    bool same = h1 == hn;
    std::cout << name << "  coeff=" << k.str() << "  serial " << serial << "s  jobs=" << jobs
              << " " << par << "s  speedup " << (par > 0 ? serial / par : 0)
              << "  identical=" << (same ? "yes" : "NO") << "\n";
    return same ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    int jobs = 4;
    if (argc > 1) jobs = std::max(1, std::atoi(argv[1]));
    int bad = 0;
    {
        CartanMatrix A = CartanMatrix::from_type("A3");
        WeylGroup W = WeylGroup::build(A);
        MomentGraph g = finite_bruhat_graph(A, W.reduced_word(W.w0), {});
        bad += bench_case("A3 full, top w0      ", g, CoeffSpec::rationals(), W.id_of(W.w0), jobs);
        bad += bench_case("A3 full, top w0      ", g, CoeffSpec::p_local(3), W.id_of(W.w0), jobs);
    }
    {
        CartanMatrix A = CartanMatrix::from_type("B2");
        WeylGroup W = WeylGroup::build(A);
        MomentGraph g = finite_bruhat_graph(A, W.reduced_word(W.w0), {});
        bad += bench_case("B2 full, top w0      ", g, CoeffSpec::prime_field(3), W.id_of(W.w0), jobs);
    }
    {
        CartanMatrix A = CartanMatrix::from_type("A1");
        AffinePoints ap(A);
        MomentGraph g = ap.graph_on_points(ap.points_below({7}));
        bad += bench_case("affine A1, lambda=7  ", g, CoeffSpec::p_local(5), "[-7]", jobs);
    }
    if (bad) {
        std::cout << "parallel/serial disagreement detected\n";
        return 1;
    }
    return 0;
}
