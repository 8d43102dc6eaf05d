// sicforge command line: verify candidate SIC sets, search for new ones,
// compute kernel/identity reports, and transform state symbols between
// quantization schemes.
//
// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 non-convergence.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sicforge/jsonio.hpp"
#include "sicforge/qubitlab.hpp"
#include "sicforge/sic.hpp"
#include "sicforge/sicsearch.hpp"
#include "sicforge/spintomo.hpp"

namespace fs = std::filesystem;
using sicforge::jsonio::json;
namespace qmat = sicforge::qmat;
namespace sic = sicforge::sic;
namespace sicsearch = sicforge::sicsearch;
namespace spintomo = sicforge::spintomo;
namespace starprod = sicforge::starprod;
namespace qubitlab = sicforge::qubitlab;
namespace jsonio = sicforge::jsonio;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNonConvergence = 3;

struct ManifestWriter {
    std::string command;
    json config = json::object();
    std::uint64_t seed = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    json result = json::object();
    json residuals = json::object();
    std::string out_dir;

    void emit() const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = seed;
        m["versions"] = {{"sicforge", "0.1.0"}};
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["wall_time_s"] = wall;
        m["result"] = result;
        m["residuals"] = residuals;
        if (out_dir.empty()) {
            std::cout << jsonio::dump(m);
        } else {
            jsonio::write_file((fs::path(out_dir) / "manifest.json").string(), m);
        }
    }
};

void ensure_out_dir(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

void write_residual_csv(const std::string& dir, const std::vector<std::pair<std::string, double>>& rows) {
    if (dir.empty()) return;
    std::ofstream csv(fs::path(dir) / "residuals.csv");
    csv << "name,value\n";
    char buf[64];
    for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        csv << name << "," << buf << "\n";
    }
}

json verification_to_json(const sic::VerificationReport& rep) {
    return json{{"hermiticity", rep.hermiticity},
                {"unit_trace", rep.unit_trace},
                {"positivity", rep.positivity},
                {"idempotence", rep.idempotence},
                {"pairwise_trace", rep.pairwise_trace},
                {"trace_power2", rep.trace_power2},
                {"trace_power3", rep.trace_power3},
                {"tolerance", rep.tolerance},
                {"pass", rep.pass}};
}

void print_verification(const sic::VerificationReport& rep) {
    auto line = [](const char* name, double value) {
        std::printf("  %-16s %.3e\n", name, value);
    };
    std::printf("condition residuals (tolerance %.3e):\n", rep.tolerance);
    line("hermiticity", rep.hermiticity);
    line("unit trace", rep.unit_trace);
    line("positivity", rep.positivity);
    line("idempotence", rep.idempotence);
    line("pairwise trace", rep.pairwise_trace);
    std::printf("  trace powers     |TrΠ²-1| %.3e  |TrΠ³-1| %.3e\n", rep.trace_power2,
                rep.trace_power3);
    std::printf("verdict: %s\n", rep.pass ? "PASS" : "FAIL");
}

int cmd_verify(const std::string& path, double tol, const std::string& out_dir) {
    ManifestWriter manifest;
    manifest.command = "verify";
    manifest.config = {{"file", path}, {"tol", tol}};
    manifest.out_dir = out_dir;
    ensure_out_dir(out_dir);

    sic::SicSet set;
    try {
        set = jsonio::sic_set_from_json(jsonio::read_file(path), tol);
    } catch (const jsonio::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    print_verification(set.verification);
    manifest.result = {{"dim", set.dim}, {"pass", set.verification.pass}};
    manifest.residuals = verification_to_json(set.verification);
    write_residual_csv(out_dir, {{"hermiticity", set.verification.hermiticity},
                                 {"unit_trace", set.verification.unit_trace},
                                 {"positivity", set.verification.positivity},
                                 {"idempotence", set.verification.idempotence},
                                 {"pairwise_trace", set.verification.pairwise_trace}});
    manifest.emit();
    return set.verification.pass ? kExitOk : kExitVerificationFailure;
}

int cmd_search(int d, std::uint64_t seed, int restarts, int budget, double tol,
               const std::string& method, const std::string& out_dir) {
    ManifestWriter manifest;
    manifest.command = "search";
    manifest.seed = seed;
    manifest.config = {{"d", d},           {"seed", seed},   {"restarts", restarts},
                       {"budget", budget}, {"tol", tol},     {"method", method}};
    manifest.out_dir = out_dir;
    ensure_out_dir(out_dir);

    if (d < 2) {
        std::cerr << "input error: require d >= 2\n";
        return kExitInputError;
    }

    sicsearch::SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.max_iterations = budget;
    cfg.tol_obj = tol;
    cfg.verify_tol = tol;

    const sicsearch::GramFactors gf = sicsearch::gram_factors(d);
    sicsearch::SearchState state;
    if (method == "optimize") {
        state = sicsearch::optimize(gf, cfg);
    } else if (method == "sequential") {
        state = sicsearch::sequential_rotations(gf, cfg);
    } else {
        std::cerr << "input error: unknown method '" << method << "'\n";
        return kExitInputError;
    }

    auto candidate = sicsearch::build_candidate(gf, state.qtilde);
    sic::SicSet set = sic::make_sic_set(std::move(candidate), tol);

    jsonio::SicSetMeta meta;
    meta.source = "search:" + method;
    meta.seed = seed;
    meta.tolerance = tol;
    if (!out_dir.empty()) {
        jsonio::write_file((fs::path(out_dir) / "sicset.json").string(),
                           jsonio::sic_set_to_json(set, meta));
        jsonio::write_file((fs::path(out_dir) / "state.json").string(),
                           jsonio::search_state_to_json(state));
    }

    std::printf("search d=%d method=%s: objective %.12f (gap %.3e), %s\n", d, method.c_str(),
                state.objective, d * d - state.objective,
                state.converged ? "converged" : "NOT converged");
    print_verification(set.verification);

    manifest.result = {{"objective", state.objective},
                       {"converged", state.converged},
                       {"iterations", state.iterations},
                       {"winning_seed", state.seed},
                       {"verify_pass", set.verification.pass}};
    manifest.residuals = verification_to_json(set.verification);
    manifest.residuals["matrix_equation"] = state.residual_matrix_equation;
    write_residual_csv(out_dir, {{"objective_gap", d * d - state.objective},
                                 {"matrix_equation", state.residual_matrix_equation},
                                 {"idempotence", set.verification.idempotence},
                                 {"positivity", set.verification.positivity}});
    manifest.emit();
    if (!state.converged || !set.verification.pass) return kExitNonConvergence;
    return kExitOk;
}

int cmd_kernels(const std::string& path, double tol, const std::string& out_dir) {
    ManifestWriter manifest;
    manifest.command = "kernels";
    manifest.config = {{"file", path}, {"tol", tol}};
    manifest.out_dir = out_dir;
    ensure_out_dir(out_dir);

    sic::SicSet set;
    try {
        set = jsonio::sic_set_from_json(jsonio::read_file(path), tol);
    } catch (const jsonio::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (!set.verification.pass) {
        std::cerr << "verification failure: input set does not pass at tol " << tol << "\n";
        print_verification(set.verification);
        return kExitVerificationFailure;
    }

    const starprod::Scheme scheme = sic::sic_scheme(set);
    const starprod::KernelTensor k_direct = starprod::kernel(scheme);
    const starprod::KernelTensor kd_direct = starprod::dual_kernel(scheme);
    const sic::TripleProductTensor t = sic::triple_products(set);
    const starprod::KernelTensor k_from_t = sic::kernel_from_T(t, false);
    const starprod::KernelTensor kd_from_t = sic::kernel_from_T(t, true);

    double k_two_route = 0.0, kd_two_route = 0.0;
    for (std::size_t i = 0; i < k_direct.entries.size(); ++i) {
        k_two_route = std::max(k_two_route, std::abs(k_direct.entries[i] - k_from_t.entries[i]));
        kd_two_route = std::max(kd_two_route, std::abs(kd_direct.entries[i] - kd_from_t.entries[i]));
    }
    const double assoc3 = starprod::check_assoc3(k_direct);
    const double assoc4 = starprod::check_assoc4(k_direct);
    const sic::TRelationReport trel = sic::check_T_relations(t);
    const sic::HigherProductReport higher = sic::higher_products(set);
    const qubitlab::LieReport lie = qubitlab::lie_structure(set);

    double delta_res = 0.0;
    {
        const Eigen::MatrixXcd dk = starprod::delta_kernel(scheme);
        for (Eigen::Index a = 0; a < dk.rows(); ++a)
            for (Eigen::Index b = 0; b < dk.cols(); ++b)
                delta_res = std::max(delta_res, std::abs(dk(a, b) - ((a == b) ? 1.0 : 0.0)));
    }

    if (!out_dir.empty()) {
        jsonio::write_file((fs::path(out_dir) / "kernel_K.json").string(),
                           jsonio::kernel_to_json(k_direct));
        jsonio::write_file((fs::path(out_dir) / "kernel_Kdual.json").string(),
                           jsonio::kernel_to_json(kd_direct));
        json tj;
        tj["dim"] = t.dim;
        json entries = json::array();
        for (int i = 0; i < set.dim * set.dim; ++i) {
            json plane = json::array();
            for (int jj = 0; jj < set.dim * set.dim; ++jj) {
                json row = json::array();
                for (int kk = 0; kk < set.dim * set.dim; ++kk)
                    row.push_back(jsonio::complex_to_json(t.at(i, jj, kk)));
                plane.push_back(std::move(row));
            }
            entries.push_back(std::move(plane));
        }
        tj["entries"] = std::move(entries);
        jsonio::write_file((fs::path(out_dir) / "triple_products.json").string(), tj);
    }

    const std::vector<std::pair<std::string, double>> rows = {
        {"delta_kernel_vs_identity", delta_res},
        {"assoc3", assoc3},
        {"assoc4", assoc4},
        {"K_two_route", k_two_route},
        {"Kdual_two_route", kd_two_route},
        {"T3_relation", trel.t3},
        {"T4_relation_first", trel.t4_first},
        {"T4_relation_second", trel.t4_second},
        {"four_product", higher.four_product},
        {"five_product", higher.five_product},
        {"lie_expansion", lie.expansion_residual},
    };
    std::printf("kernel/identity residuals (d=%d):\n", set.dim);
    for (const auto& [name, value] : rows) std::printf("  %-24s %.3e\n", name.c_str(), value);
    write_residual_csv(out_dir, rows);
    for (const auto& [name, value] : rows) manifest.residuals[name] = value;
    manifest.result = {{"dim", set.dim}, {"pass", true}};
    manifest.emit();
    return kExitOk;
}

struct SchemeChoice {
    starprod::Scheme scheme;
};

int build_scheme(const std::string& kind, int dim, const std::string& sic_path,
                 const std::string& dir_path, double tol, SchemeChoice& out, std::string& err) {
    try {
        if (kind == "sic") {
            sic::SicSet set;
            if (!sic_path.empty()) {
                set = jsonio::sic_set_from_json(jsonio::read_file(sic_path), tol);
            } else if (dim == 2) {
                set = qubitlab::canonical_sic();
            } else {
                err = "no --sic file given and no built-in SIC for d=" + std::to_string(dim);
                return kExitInputError;
            }
            if (!set.verification.pass) {
                err = "SIC set failed verification";
                return kExitVerificationFailure;
            }
            if (set.dim != dim) {
                err = "SIC set dimension does not match the state";
                return kExitInputError;
            }
            out.scheme = sic::sic_scheme(set);
            return kExitOk;
        }
        const double j = (dim - 1) / 2.0;
        if (kind == "spin") {
            out.scheme = spintomo::continuous_scheme(j);
            return kExitOk;
        }
        if (kind == "fnr") {
            spintomo::DirectionSet ds;
            if (!dir_path.empty()) {
                ds = jsonio::directions_from_json(jsonio::read_file(dir_path));
            } else {
                ds = spintomo::default_fnr_directions(j);
            }
            out.scheme = spintomo::fnr_scheme(j, ds);
            return kExitOk;
        }
        err = "unknown scheme kind '" + kind + "' (use sic|spin|fnr)";
        return kExitInputError;
    } catch (const jsonio::ParseError& e) {
        err = e.what();
        return kExitInputError;
    } catch (const std::exception& e) {
        err = e.what();
        return kExitInputError;
    }
}

int cmd_transform(const std::string& state_path, const std::string& from_kind,
                  const std::string& to_kind, const std::string& sic_path,
                  const std::string& dir_path, bool roundtrip, double tol,
                  const std::string& out_dir) {
    ManifestWriter manifest;
    manifest.command = "transform";
    manifest.config = {{"state", state_path}, {"from", from_kind}, {"to", to_kind},
                       {"roundtrip", roundtrip}, {"tol", tol}};
    manifest.out_dir = out_dir;
    ensure_out_dir(out_dir);

    qmat::Matrix rho;
    try {
        rho = jsonio::density_from_json(jsonio::read_file(state_path));
        spintomo::validate_density_matrix(rho);
    } catch (const jsonio::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }

    const int dim = static_cast<int>(rho.rows());
    SchemeChoice from, to;
    std::string err;
    int rc = build_scheme(from_kind, dim, sic_path, dir_path, tol, from, err);
    if (rc != kExitOk) {
        std::cerr << (rc == kExitInputError ? "input error: " : "verification failure: ") << err
                  << "\n";
        return rc;
    }
    rc = build_scheme(to_kind, dim, sic_path, dir_path, tol, to, err);
    if (rc != kExitOk) {
        std::cerr << (rc == kExitInputError ? "input error: " : "verification failure: ") << err
                  << "\n";
        return rc;
    }

    const starprod::Symbol f_from = starprod::symbol(rho, from.scheme);
    const starprod::Symbol f_to = qubitlab::intertwine(f_from, from.scheme, to.scheme);
    if (!out_dir.empty()) {
        jsonio::write_file((fs::path(out_dir) / "symbol.json").string(),
                           jsonio::symbol_to_json(f_to, to.scheme));
    }
    manifest.result = {{"dim", dim}, {"from", from.scheme.label}, {"to", to.scheme.label}};

    if (roundtrip) {
        const starprod::Symbol f_back = qubitlab::intertwine(f_to, to.scheme, from.scheme);
        const double rt = (f_back.values - f_from.values).cwiseAbs().maxCoeff();
        std::printf("roundtrip residual: %.3e\n", rt);
        manifest.residuals["roundtrip"] = rt;
    }
    std::printf("transform %s -> %s: wrote %zu symbol values\n", from.scheme.label.c_str(),
                to.scheme.label.c_str(), to.scheme.size());
    manifest.emit();
    return kExitOk;
}

int cmd_qubit_demo() {
    const sic::SicSet canonical = qubitlab::canonical_sic();
    std::printf("reference qubit SIC\n");
    print_verification(canonical.verification);

    const auto closed = qubitlab::qubit_closed_forms(canonical);
    const sic::TripleProductTensor t = sic::triple_products(canonical);
    double t_diff = 0.0;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        t_diff = std::max(t_diff, std::abs(t.entries[i] - closed.t.entries[i]));
    }
    std::printf("closed-form vs generic triple products: %.3e (det class %+d)\n", t_diff,
                closed.det_class);

    const starprod::Scheme sic_s = sic::sic_scheme(canonical);
    const starprod::Scheme spin_s = spintomo::continuous_scheme(0.5);
    const starprod::Scheme fnr_s = spintomo::fnr_scheme(0.5, spintomo::default_fnr_directions(0.5));

    double rt_spin = 0.0, rt_fnr = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            qmat::Matrix e = qmat::Matrix::Zero(2, 2);
            e(a, b) = 1.0;
            const starprod::Symbol f = starprod::symbol(e, sic_s);
            const starprod::Symbol back_spin =
                qubitlab::intertwine(qubitlab::intertwine(f, sic_s, spin_s), spin_s, sic_s);
            const starprod::Symbol back_fnr =
                qubitlab::intertwine(qubitlab::intertwine(f, sic_s, fnr_s), fnr_s, sic_s);
            rt_spin = std::max(rt_spin, (back_spin.values - f.values).cwiseAbs().maxCoeff());
            rt_fnr = std::max(rt_fnr, (back_fnr.values - f.values).cwiseAbs().maxCoeff());
        }
    }
    std::printf("intertwining round trips: SIC<->spin %.3e, SIC<->FNR %.3e\n", rt_spin, rt_fnr);

    const auto mubs = qubitlab::mub_bases();
    double intra = 0.0, cross = 0.0;
    for (int i = 0; i < 3; ++i) {
        intra = std::max(intra, std::abs(mubs[static_cast<std::size_t>(i)].first.dot(
            mubs[static_cast<std::size_t>(i)].second)));
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            for (const auto* a : {&mubs[static_cast<std::size_t>(i)].first,
                                  &mubs[static_cast<std::size_t>(i)].second}) {
                for (const auto* b : {&mubs[static_cast<std::size_t>(j)].first,
                                      &mubs[static_cast<std::size_t>(j)].second}) {
                    cross = std::max(cross, std::abs(std::norm(a->dot(*b)) - 0.5));
                }
            }
        }
    }
    std::printf("MUB overlaps: intra-pair %.3e, |cross|^2 - 1/2 %.3e\n", intra, cross);

    const qubitlab::LieReport lie = qubitlab::lie_structure(canonical);
    std::printf("Lie expansion residual %.3e (epsilon sign %+d, fit %.3e)\n",
                lie.expansion_residual, lie.eps_sign, lie.eps_residual);
    const qubitlab::CasimirReport cas = qubitlab::casimir_check(canonical);
    std::printf("Casimir: |C1| %.3e, C2 closed-form %.3e, commute %.3e, table %.3e, final %.3e "
                "-> %s\n",
                cas.c1_residual, cas.c2_closed_form_residual, cas.casimir_commute_residual,
                cas.table_residual, cas.final_relation_residual, cas.pass ? "PASS" : "FAIL");
    return cas.pass && canonical.verification.pass ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"star-product quantization toolkit: SIC-POVM search and certification"};
    app.require_subcommand(1);

    std::string file, out_dir, method = "optimize", from_kind, to_kind, sic_path, dir_path;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    int d = 2, restarts = 16, budget = 2000;
    bool roundtrip = false;

    auto* verify = app.add_subcommand("verify", "verify a SIC set file");
    verify->add_option("file", file)->required();
    verify->add_option("--tol", tol, "verification tolerance");
    verify->add_option("--out", out_dir, "output directory for manifest/residuals");

    auto* search = app.add_subcommand("search", "search for a SIC set");
    search->add_option("-d,--dim", d, "Hilbert-space dimension")->required();
    search->add_option("--seed", seed);
    search->add_option("--restarts", restarts);
    search->add_option("--budget", budget, "max iterations per restart");
    double search_tol = 1e-6;
    search->add_option("--tol", search_tol, "objective/verification tolerance");
    search->add_option("--method", method)->check(CLI::IsMember({"optimize", "sequential"}));
    search->add_option("--out", out_dir, "output directory");

    auto* kernels = app.add_subcommand("kernels", "kernel and identity report for a SIC set");
    kernels->add_option("file", file)->required();
    double kernel_tol = 1e-10;
    kernels->add_option("--tol", kernel_tol, "verification tolerance");
    kernels->add_option("--out", out_dir, "output directory");

    auto* transform = app.add_subcommand("transform", "transform a state symbol between schemes");
    transform->add_option("state", file)->required();
    transform->add_option("--from", from_kind)->required();
    transform->add_option("--to", to_kind)->required();
    transform->add_option("--sic", sic_path, "SIC set file for sic schemes");
    transform->add_option("--directions", dir_path, "direction set file for fnr schemes");
    double transform_tol = 1e-10;
    transform->add_option("--tol", transform_tol);
    transform->add_flag("--roundtrip", roundtrip, "report the round-trip error");
    transform->add_option("--out", out_dir, "output directory");

    auto* demo = app.add_subcommand("qubit-demo", "print the qubit identity report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(file, tol, out_dir);
        if (search->parsed()) return cmd_search(d, seed, restarts, budget, search_tol, method, out_dir);
        if (kernels->parsed()) return cmd_kernels(file, kernel_tol, out_dir);
        if (transform->parsed()) {
            return cmd_transform(file, from_kind, to_kind, sic_path, dir_path, roundtrip,
                                 transform_tol, out_dir);
        }
        if (demo->parsed()) return cmd_qubit_demo();
    } catch (const jsonio::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
