#include "specbound/gen.hpp"
#include "specbound/json_io.hpp"
#include "specbound/selftest.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sb = specbound;
using sb::json;

namespace {

struct CommonFlags {
    std::string tol_csv;
    std::uint64_t seed = 0;
    int budget = 10000;
    double threshold = 1e3;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--tol", f.tol_csv, "rank_rel,scalar_rel,spec_abs (comma separated)");
    cmd->add_option("--seed", f.seed, "root seed; all randomness derives from it");
    cmd->add_option("--budget", f.budget, "search budget in ratio evaluations");
    cmd->add_option("--threshold", f.threshold, "blowup ratio threshold");
    cmd->add_option("--format", f.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
}

sb::Tolerance parse_tol(const std::string& csv, bool validate = true) {
    sb::Tolerance t;
    if (csv.empty()) return t;
    double v[3];
    char comma1 = 0, comma2 = 0;
    std::istringstream in(csv);
    if (!(in >> v[0] >> comma1 >> v[1] >> comma2 >> v[2]) || comma1 != ',' || comma2 != ',')
        throw sb::MatError("--tol: expected rank_rel,scalar_rel,spec_abs");
    t.rank_rel = v[0];
    t.scalar_rel = v[1];
    t.spec_abs = v[2];
    if (validate) t.validate();
    return t;
}

json read_json(const std::string& path) {
    try {
        if (path == "-") return json::parse(std::cin);
        std::ifstream in(path);
        if (!in) throw sb::MatError(path + ": cannot open");
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw sb::MatError(path + ": " + e.what());
    }
}

int thread_cap() {
    const char* env = std::getenv("SPECBOUND_THREADS");
    if (!env) return 1;
    int v = std::atoi(env);
    return v > 0 ? v : 1;
}

int cmd_analyze(const std::string& path, const CommonFlags& f) {
    sb::Tolerance tol = parse_tol(f.tol_csv);
    sb::ElOp op = sb::json_to_operator(read_json(path));
    auto t0 = std::chrono::steady_clock::now();

    int len = sb::length(op, tol);
    sb::ElOpSpaces sp = sb::spaces(op, tol, 32, sb::child_seed(f.seed, "spaces"));
    sb::CMat ba = sb::trace_vector(op);
    auto central = sb::scalar_of_identity(ba, tol);
    sb::Verdict v = sb::classify(op, tol, f.budget, sb::child_seed(f.seed, "classify"));
    sb::ConsequenceReport cons =
        sb::consequence_suite(op, v, 20, sb::child_seed(f.seed, "consequences"), tol);
    sb::NormEstimate est =
        sb::estimate_spectral_norm(op, f.budget, sb::child_seed(f.seed, "norm"), tol);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto space_json = [](const sb::OpSpace& s) {
        return json{{"dim", s.dim}, {"local_dim", s.local_dim}};
    };
    json checks = json::array();
    for (const auto& c : cons.checks)
        checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json report{
        {"operator", json{{"dim", op.dim}, {"terms", op.terms.size()}}},
        {"length", len},
        {"spaces", json{{"L", space_json(sp.L)},
                        {"R", space_json(sp.R)},
                        {"V", space_json(sp.V)},
                        {"Vp", space_json(sp.Vp)}}},
        {"trace_vector", sb::matrix_to_json(ba)},
        {"trace_central", central.has_value()},
        {"trace_scalar", central ? sb::complex_to_json(*central) : json(nullptr)},
        {"verdict", sb::verdict_to_json(v)},
        {"consequences", json{{"all_pass", cons.all_pass}, {"checks", std::move(checks)}}},
        {"spectral_norm_lower_bound", est.lower_bound},
        {"seed", f.seed},
        {"tolerance", sb::tolerance_to_json(tol)},
    };
    if (f.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "dim " << op.dim << ", " << op.terms.size() << " terms, length " << len
                  << "\n";
        std::cout << "spaces: L " << sp.L.dim << "/" << sp.L.local_dim << "  R " << sp.R.dim
                  << "/" << sp.R.local_dim << "  V " << sp.V.dim << "/" << sp.V.local_dim
                  << "  V' " << sp.Vp.dim << "/" << sp.Vp.local_dim << " (dim/local dim)\n";
        std::cout << "trace vector " << (central ? "central" : "NOT central") << "\n";
        std::cout << "status " << sb::to_string(v.status);
        if (v.certificate && !v.certificate->form.empty())
            std::cout << " (form " << v.certificate->form << ")";
        if (!v.reason.empty()) std::cout << " [" << v.reason << "]";
        std::cout << "\n";
        for (const auto& c : v.checks)
            std::cout << "  check " << c.name << ": " << (c.pass ? "pass" : "FAIL") << " ("
                      << c.detail << ")\n";
        std::cout << "consequences: " << (cons.all_pass ? "all pass" : "FAILURES") << "\n";
        for (const auto& c : cons.checks)
            std::cout << "  " << c.name << ": " << (c.pass ? "pass" : "FAIL") << " (" << c.detail
                      << ")\n";
        std::cout << "spectral norm lower bound " << est.lower_bound << "\n";
        std::cout << "elapsed " << elapsed << " s, seed " << f.seed << "\n";
    }
    return 0;
}

int cmd_search_blowup(const std::string& path, const CommonFlags& f) {
    if (f.threshold <= 0.0) throw sb::MatError("--threshold: must be positive");
    sb::Tolerance tol = parse_tol(f.tol_csv);
    sb::ElOp op = sb::json_to_operator(read_json(path));
    auto w = sb::search_blowup(op, f.threshold, f.budget, f.seed, tol);
    if (f.format == "json") {
        json out{{"found", w.has_value()},
                 {"witness", w ? sb::witness_to_json(*w) : json(nullptr)},
                 {"seed", f.seed},
                 {"threshold", f.threshold}};
        std::cout << out.dump(2) << "\n";
    } else if (w) {
        std::cout << "found (" << w->construction << "): ratios";
        for (double r : w->ratios) std::cout << " " << r;
        std::cout << "\n";
    } else {
        std::cout << "none\n";
    }
    return 0;
}

int cmd_gen(const std::string& kind, int n, int k, const CommonFlags& f) {
    if (n < 2) throw sb::MatError("gen: requires n >= 2");
    sb::ElOp op;
    if (kind == "triangular") {
        op = sb::gen_triangular(n, k, f.seed).op;
    } else if (kind == "form2") {
        op = sb::gen_form2(n, f.seed).op;
    } else if (kind == "form3") {
        op = sb::gen_form3(n, f.seed).op;
    } else if (kind == "random") {
        op = sb::gen_random(n, k, f.seed);
    } else if (kind == "length2-good") {
        op = sb::gen_length2_good(n, f.seed);
    } else if (kind == "unbounded-seeded") {
        op = sb::gen_unbounded(n, k, f.seed);
    } else {
        throw sb::MatError("gen: unknown kind " + kind);
    }
    std::cout << sb::operator_to_json(op).dump(2) << "\n";
    return 0;
}

int cmd_selftest(bool full, const CommonFlags& f) {
    // out-of-range tolerances run anyway: feeding a corrupted tolerance
    // through the suites is the negative control for the suites themselves
    sb::Tolerance tol = parse_tol(f.tol_csv, /*validate=*/false);
    auto results = sb::run_acceptance(!full, f.seed, tol);
    bool all = true;
    for (const auto& r : results) {
        std::cout << "suite " << r.index << " [" << r.name << "]: "
                  << (r.pass ? "pass" : "FAIL") << "  (" << r.checked << " checks, " << r.failed
                  << " failures, " << r.seconds << " s)";
        if (!r.detail.empty()) std::cout << "  " << r.detail;
        std::cout << "\n";
        all = all && r.pass;
    }
    std::cout << (all ? "selftest: pass" : "selftest: FAIL") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral boundedness of elementary operators on M_n(C)"};
    app.require_subcommand(1);
    (void)thread_cap();  // honored as a cap; current search is sequential

    CommonFlags flags;
    std::string path = "-";
    std::string kind;
    int n = 4, k = 3;
    bool full = false, quick = false;

    CLI::App* analyze = app.add_subcommand("analyze", "full analysis report for an operator");
    analyze->add_option("path", path, "operator JSON file, or - for stdin");
    add_common(analyze, flags);

    CLI::App* search = app.add_subcommand("search-blowup", "hunt for a blowup witness");
    search->add_option("path", path, "operator JSON file, or - for stdin");
    add_common(search, flags);

    CLI::App* gen = app.add_subcommand("gen", "generate a structured operator");
    gen->add_option("kind", kind,
                    "triangular | form2 | form3 | random | length2-good | unbounded-seeded")
        ->required();
    gen->add_option("n", n, "matrix size")->required();
    gen->add_option("--k", k, "term count where applicable (default 3)");
    add_common(gen, flags);

    CLI::App* self = app.add_subcommand("selftest", "run the acceptance suites");
    self->add_flag("--full", full, "full sample counts");
    self->add_flag("--quick", quick, "reduced sample counts (default)");
    add_common(self, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(path, flags);
        if (search->parsed()) return cmd_search_blowup(path, flags);
        if (gen->parsed()) return cmd_gen(kind, n, k, flags);
        if (self->parsed()) return cmd_selftest(full, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
