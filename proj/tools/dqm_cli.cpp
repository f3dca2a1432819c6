// Command-line surface: batch spectrum computation, level deletion with full
// verification reports, catalog export, birth-death kernels, and the
// aggregate verify-all battery.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dqm/adler.hpp"
#include "dqm/bdp.hpp"
#include "dqm/casorati.hpp"
#include "dqm/christoffel.hpp"
#include "dqm/crum.hpp"
#include "dqm/families.hpp"
#include "dqm/hamiltonian.hpp"
#include "dqm/special_deletion.hpp"
#include "json.hpp"

using nlohmann::json;

namespace dqm {

struct RunConfig {
    std::string command;
    std::string family;
    std::map<std::string, double> overrides;
    std::vector<int> levels;
    int ell = 0;
    std::string format = "json";
    std::string out;
    bool unsafe = false;
    bool special = false;
    double time = 0.5;
    double identity_tol = -1;
    double positivity_tol = -1;
    double tail_tol = -1;
    std::uint64_t seed = 42;

    json to_json() const {
        json j;
        j["command"] = command;
        j["family"] = family;
        j["overrides"] = overrides;
        j["levels"] = levels;
        j["ell"] = ell;
        j["format"] = format;
        j["out"] = out;
        j["unsafe"] = unsafe;
        j["special"] = special;
        j["time"] = time;
        j["identity_tol"] = identity_tol;
        j["positivity_tol"] = positivity_tol;
        j["tail_tol"] = tail_tol;
        j["seed"] = seed;
        return j;
    }
};

namespace {

void apply_tolerances(const RunConfig& cfg) {
    NumericPolicy& p = default_policy();
    if (cfg.identity_tol > 0) p.identity_tol = static_cast<Real>(cfg.identity_tol);
    if (cfg.positivity_tol > 0) p.positivity_tol = static_cast<Real>(cfg.positivity_tol);
    if (cfg.tail_tol > 0) p.tail_tol = static_cast<Real>(cfg.tail_tol);
    p.validate();
}

ParameterSet build_lambda(const Family& fam, const RunConfig& cfg) {
    ParameterSet lambda = fam.default_parameters();
    for (const auto& [name, value] : cfg.overrides) {
        if (name == "q")
            lambda.set_q(static_cast<Real>(value));
        else
            lambda.override_coeff(name, static_cast<Real>(value));
    }
    return lambda;
}

void emit(const RunConfig& cfg, const std::string& text, const std::string& suffix) {
    std::string path = cfg.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("DQM_OUT_DIR")) {
            path = std::string(dir) + "/" + cfg.command + "_" + cfg.family + suffix;
        }
    }
    if (path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream os(path);
        os << text;
        std::cerr << "wrote " << path << "\n";
    }
}

int cmd_spectrum(const RunConfig& cfg) {
    const Family& fam = family(cfg.family);
    ParameterSet lambda = build_lambda(fam, cfg);
    const GridSpec grid = make_grid(fam, lambda);
    validate_parameters(cfg.family, lambda, grid);
    const SpectrumReport rep = spectrum_report(fam, lambda, grid);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "n,energy,closed_form,residual\n";
        for (size_t n = 0; n < rep.eigenvalues.size(); ++n)
            os << n << "," << static_cast<double>(rep.eigenvalues[n]) << ","
               << static_cast<double>(rep.closed_form[n]) << ","
               << static_cast<double>(std::fabs(rep.eigenvalues[n] - rep.closed_form[n])) << "\n";
        emit(cfg, os.str(), ".csv");
    } else {
        emit(cfg, spectrum_report_json(rep, lambda), ".json");
    }
    return rep.pass ? 0 : 3;
}

int cmd_delete(const RunConfig& cfg) {
    const Family& fam = family(cfg.family);
    ParameterSet lambda = build_lambda(fam, cfg);
    const GridSpec grid = make_grid(fam, lambda);
    validate_parameters(cfg.family, lambda, grid);

    DeletionSet del = validate_deletion(cfg.levels, grid.n_max());
    if (!del.admissible && !cfg.unsafe) {
        std::cerr << "deletion set {";
        for (size_t i = 0; i < del.levels.size(); ++i)
            std::cerr << (i ? "," : "") << del.levels[i];
        std::cerr << "} is inadmissible: levels must form even clusters of contiguous "
                     "integers (a cluster containing 0 may have any length); "
                     "rerun with --unsafe to construct anyway\n";
        return 4;
    }

    const DeletedSystem stepwise = adler_chain(fam, lambda, grid, del, cfg.unsafe);
    json j = json::parse(deletion_report_json(stepwise));

    Real path_dev = 0;
    if (del.admissible) {
        const DeletedSystem casor = barred_system_casoratian(fam, lambda, grid, del);
        const DeletedSystem poly = polynomial_fast_path(fam, lambda, grid, del);
        for (int x = 0; x <= stepwise.xbar_max; ++x) {
            auto rel = [](Real a, Real b) {
                return std::fabs(a - b) / std::max({Real(1), std::fabs(a), std::fabs(b)});
            };
            path_dev = std::max({path_dev, rel(stepwise.bbar[x], casor.bbar[x]),
                                 rel(stepwise.bbar[x], poly.bbar[x]),
                                 rel(stepwise.dbar[x], casor.dbar[x]),
                                 rel(stepwise.dbar[x], poly.dbar[x])});
        }
        j["path_agreement"] = {{"stepwise_casoratian_polynomial_max_dev",
                                static_cast<double>(path_dev)}};
    }

    bool special_requested = cfg.special;
    std::vector<int> expect_special;
    for (int k = 1; k <= del.ell(); ++k) expect_special.push_back(k);
    if (special_requested && del.levels != expect_special) {
        std::cerr << "--special needs levels 1,2,...,l\n";
        return 2;
    }
    if (special_requested) {
        const SpecialDeletedSystem sp =
            build_special(fam, lambda, grid, del.ell(), del.ell() % 2 != 0);
        Real dev = 0;
        for (int x = 0; x <= sp.xbar_max; ++x) {
            dev = std::max(dev, std::fabs(sp.bl[x] - stepwise.bbar[x]) /
                                    std::max(Real(1), std::fabs(sp.bl[x])));
            dev = std::max(dev, std::fabs(sp.dl[x] - stepwise.dbar[x]) /
                                    std::max(Real(1), std::fabs(sp.dl[x])));
        }
        j["special_path_max_dev"] = static_cast<double>(dev);
        j["special"] = json::parse(special_report_json(sp));
        std::cout << "special/generic agreement: max deviation " << static_cast<double>(dev)
                  << "\n";
    }

    if (del.admissible && !del.contains_zero && del.ell() % 2 == 0) {
        const DeformedDualityReport dd = deformed_duality_check(stepwise);
        j["deformed_duality"] = {{"duality_dev", static_cast<double>(dd.duality_dev)},
                                 {"orthogonality_dev", static_cast<double>(dd.orthogonality_dev)},
                                 {"q0_dev", static_cast<double>(dd.q0_dev)},
                                 {"pass", dd.pass}};
        if (!cfg.out.empty() || std::getenv("DQM_OUT_DIR")) {
            const DualTable table =
                dual_table(stepwise.bbar, stepwise.dbar, stepwise.levels, stepwise.energies, true);
            RunConfig csv_cfg = cfg;
            csv_cfg.command = "dual";
            emit(csv_cfg, dual_table_csv(table, stepwise.energies), ".csv");
        }
    }

    emit(cfg, j.dump(2), ".json");
    const bool ok = j["hermiticity"]["pass"].get<bool>() &&
                    (!del.admissible || path_dev <= 1e-8L);
    return ok ? 0 : 3;
}

int cmd_kernel(const RunConfig& cfg) {
    const Family& fam = family(cfg.family);
    ParameterSet lambda = build_lambda(fam, cfg);
    const GridSpec grid = make_grid(fam, lambda);
    validate_parameters(cfg.family, lambda, grid);
    const JacobiSystem sys = build(fam, lambda, grid);
    const TransitionKernel k = transition_kernel(sys, static_cast<Real>(cfg.time));
    emit(cfg, kernel_csv(k), ".csv");
    RunConfig decay_cfg = cfg;
    decay_cfg.command = "decay";
    emit(decay_cfg, decay_report_json(decay_rate_report(sys)), ".json");
    return 0;
}

struct CheckLine {
    std::string name;
    bool pass;
    double value;
};

int cmd_verify_all(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckLine> checks;
    auto add = [&](const std::string& name, bool pass, Real value) {
        checks.push_back({name, pass, static_cast<double>(value)});
        std::cout << (pass ? "PASS " : "FAIL ") << name << "  (" << static_cast<double>(value)
                  << ")\n";
    };
    const NumericPolicy& policy = default_policy();

    for (const std::string& id : implemented_family_ids()) {
        const Family& fam = family(id);
        ParameterSet lambda = fam.default_parameters();
        const GridSpec grid = make_grid(fam, lambda);
        validate_parameters(id, lambda, grid);

        if (grid.finite()) {
            const SpectrumReport sr = spectrum_report(fam, lambda, grid);
            add(id + ": spectrum matches closed form", sr.pass, sr.max_residual);
        }
        const ShapeInvarianceReport si = verify_shape_invariance(fam, lambda, grid);
        add(id + ": shape invariance", si.pass,
            std::max({si.b_dev, si.d_dev, si.cond1_dev, si.cond2_dev, si.energy_sum_dev}));
        const DualityReport du = duality_check(fam, lambda, grid);
        add(id + ": duality and dual orthogonality", du.pass,
            std::max(du.duality_dev, du.dual_orthogonality_dev));
        if (fam.has_xi()) {
            Real xi_dev = 0;
            for (int ell = 1; ell <= 3; ++ell)
                for (int x = 0; x <= std::min(grid.x_max - ell, 5); ++x)
                    xi_dev = std::max(xi_dev,
                                      xi_vs_casoratian_residual(fam, lambda, ell, x));
            add(id + ": deforming polynomial closed form vs determinant", xi_dev <= 1e-8L, xi_dev);
        }
    }

    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> coeff(-4, 4);
        Real worst1 = 0, worst2 = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            auto rand_poly = [&] {
                Vector v;
                const int c3 = coeff(rng), c2 = coeff(rng), c1 = coeff(rng), c0 = coeff(rng);
                for (int x = 0; x <= 10; ++x)
                    v.push_back(((c3 * x + c2) * x + c1) * x + c0);
                return SampledFunction(0, v);
            };
            const std::vector<SampledFunction> fs = {rand_poly(), rand_poly(), rand_poly()};
            const SampledFunction g = rand_poly(), h = rand_poly();
            worst1 = std::max(worst1, check_product_rule(g, fs, trial % 4));
            worst2 = std::max(worst2,
                              check_wronskian_identity({fs.begin(), fs.begin() + 2}, g, h,
                                                       trial % 4));
        }
        add("Casoratian product rule, 1000 random trials", worst1 <= 1e-12L, worst1);
        add("Casoratian composition identity, 1000 random trials", worst2 <= 1e-12L, worst2);
    }

    const std::vector<std::vector<int>> battery = {{1, 2}, {2, 3}, {1, 2, 3, 4}};
    for (const std::string& id : {"krawtchouk", "hahn", "dual_quantum_q_krawtchouk"}) {
        const Family& fam = family(id);
        ParameterSet lambda = fam.default_parameters();
        const GridSpec grid = make_grid(fam, lambda);
        for (const auto& levels : battery) {
            const DeletionSet del = validate_deletion(levels, grid.n_max());
            const DeletedSystem a = adler_chain(fam, lambda, grid, del);
            const DeletedSystem b = barred_system_casoratian(fam, lambda, grid, del);
            const DeletedSystem c = polynomial_fast_path(fam, lambda, grid, del);
            Real dev = 0;
            auto rel = [](Real u, Real v) {
                return std::fabs(u - v) / std::max({Real(1), std::fabs(u), std::fabs(v)});
            };
            for (int x = 0; x <= a.xbar_max; ++x)
                dev = std::max({dev, rel(a.bbar[x], b.bbar[x]), rel(a.bbar[x], c.bbar[x]),
                                rel(a.dbar[x], b.dbar[x]), rel(a.dbar[x], c.dbar[x])});
            std::ostringstream name;
            name << id << ": deletion {";
            for (size_t i = 0; i < levels.size(); ++i) name << (i ? "," : "") << levels[i];
            name << "} path equivalence";
            add(name.str(), dev <= 1e-8L, dev);

            const JacobiSystem sys = a.system();
            Real sdev = 0;
            const Vector& ev = sys.eigensystem().values;
            for (size_t k = 0; k < ev.size(); ++k)
                sdev = std::max(sdev, std::fabs(ev[k] - (a.energies[k] - a.e_mu)) /
                                          std::max(Real(1), std::fabs(a.energies[k])));
            add(name.str() + " spectrum", sdev <= 1e-8L, sdev);

            if (!del.contains_zero && del.ell() % 2 == 0) {
                const DeformedDualityReport dd = deformed_duality_check(a);
                add(name.str() + " deformed duality", dd.pass,
                    std::max(dd.duality_dev, dd.orthogonality_dev));
            }
        }
    }

    {
        const Family& fam = family("dual_quantum_q_krawtchouk");
        ParameterSet lambda = fam.default_parameters();
        const GridSpec grid = make_grid(fam, lambda);
        const SpecialDeletedSystem sp = build_special(fam, lambda, grid, 2);
        const DeletionSet del = validate_deletion({1, 2}, grid.n_max());
        const DeletedSystem a = adler_chain(fam, lambda, grid, del);
        Real dev = 0;
        for (int x = 0; x <= sp.xbar_max; ++x) {
            dev = std::max(dev, std::fabs(sp.bl[x] - a.bbar[x]) /
                                    std::max(Real(1), std::fabs(a.bbar[x])));
            dev = std::max(dev, std::fabs(sp.dl[x] - a.dbar[x]) /
                                    std::max(Real(1), std::fabs(a.dbar[x])));
        }
        add("special path vs generic path, depth 2", dev <= 1e-8L, dev);
        const ShiftOperatorReport so = shift_operator_checks(sp, 4);
        add("special path shift operators", so.pass,
            std::max({so.forward_dev, so.backward_dev, so.factor_dev, so.energy_relation_dev,
                      so.partner_hamiltonian_dev}));
    }

    {
        const Family& fam = family("krawtchouk");
        ParameterSet lambda = fam.default_parameters();
        const GridSpec grid = make_grid(fam, lambda);
        const JacobiSystem sys = build(fam, lambda, grid);
        const TransitionKernel k1 = transition_kernel(sys, 0.3L);
        const TransitionKernel k2 = transition_kernel(sys, 0.5L);
        const TransitionKernel k3 = transition_kernel(sys, 0.8L);
        const Real ck = (k1.p * k2.p - k3.p).max_abs();
        add("birth-death Chapman-Kolmogorov", ck <= 1e-8L,
            std::max({ck, k1.row_sum_dev, k1.spectral_residual}));
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();

    json j;
    j["schema"] = "dqm-report/1";
    j["seed"] = cfg.seed;
    j["elapsed_seconds"] = secs;
    j["checks"] = json::array();
    int failures = 0;
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
        if (!c.pass) ++failures;
    }
    j["failures"] = failures;
    RunConfig out_cfg = cfg;
    out_cfg.family = "all";
    emit(out_cfg, j.dump(2), ".json");
    std::cout << (failures == 0 ? "all checks passed" : "FAILURES: " + std::to_string(failures))
              << " in " << secs << " s\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace
}  // namespace dqm

int main(int argc, char** argv) {
    CLI::App app{"discrete quantum mechanics with real shifts: spectra, level deletion, "
                 "dual Christoffel transformations"};
    app.require_subcommand(1);

    dqm::RunConfig cfg;
    std::optional<double> q, p, a, b, c, d, beta, cpar;
    std::optional<int> n_par;
    std::string levels_arg;
    bool dump_config = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--dump-config", dump_config,
                      "print the parsed configuration in canonical form and exit");
        sub->add_option("--family", cfg.family, "family id from the catalog");
        sub->add_option("--q", q, "base q");
        sub->add_option("--N", n_par, "grid size N");
        sub->add_option("--p", p, "parameter p");
        sub->add_option("--a", a, "parameter a");
        sub->add_option("--b", b, "parameter b");
        sub->add_option("--c", cpar, "parameter c");
        sub->add_option("--d", d, "parameter d");
        sub->add_option("--beta", beta, "parameter beta");
        sub->add_option("--format", cfg.format, "json or csv")->default_str("json");
        sub->add_option("--out", cfg.out, "output file (default: stdout or $DQM_OUT_DIR)");
        sub->add_option("--identity-tol", cfg.identity_tol, "identity tolerance override");
        sub->add_option("--positivity-tol", cfg.positivity_tol, "positivity tolerance override");
        sub->add_option("--tail-tol", cfg.tail_tol, "truncation tail tolerance override");
        sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues vs closed-form energies");
    add_common(spectrum);
    CLI::App* del = app.add_subcommand("delete", "Krein-Adler deletion report");
    add_common(del);
    del->add_option("--levels", levels_arg, "comma-separated levels, e.g. 1,2")->required();
    del->add_flag("--unsafe", cfg.unsafe, "allow inadmissible deletion sets");
    del->add_flag("--special", cfg.special, "route {1..l} through the deforming-polynomial path");
    CLI::App* verify = app.add_subcommand("verify-all", "full identity battery");
    add_common(verify);
    CLI::App* catalog = app.add_subcommand("catalog", "family catalog as JSON");
    add_common(catalog);
    CLI::App* kernel = app.add_subcommand("kernel", "birth-death transition kernel CSV");
    add_common(kernel);
    kernel->add_option("--time", cfg.time, "evolution time")->default_str("0.5");

    CLI11_PARSE(app, argc, argv);

    auto put = [&](const char* name, const std::optional<double>& v) {
        if (v) cfg.overrides[name] = *v;
    };
    put("q", q);
    put("p", p);
    put("a", a);
    put("b", b);
    put("c", cpar);
    put("d", d);
    put("beta", beta);
    if (n_par) cfg.overrides["N"] = *n_par;
    if (!levels_arg.empty()) {
        std::stringstream ss(levels_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t used = 0;
                const int level = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                cfg.levels.push_back(level);
            } catch (const std::exception&) {
                std::cerr << "domain error: --levels expects integers, got '" << tok << "'\n";
                return 2;
            }
        }
    }

    if (spectrum->parsed()) cfg.command = "spectrum";
    if (del->parsed()) cfg.command = "delete";
    if (verify->parsed()) cfg.command = "verify";
    if (catalog->parsed()) cfg.command = "catalog";
    if (kernel->parsed()) cfg.command = "kernel";
    if (dump_config) {
        std::cout << cfg.to_json().dump(2) << "\n";
        return 0;
    }

    try {
        dqm::apply_tolerances(cfg);
        if (spectrum->parsed()) {
            cfg.command = "spectrum";
            if (cfg.family.empty()) throw dqm::OutOfDomain("family", "--family is required");
            return dqm::cmd_spectrum(cfg);
        }
        if (del->parsed()) {
            cfg.command = "delete";
            if (cfg.family.empty()) throw dqm::OutOfDomain("family", "--family is required");
            return dqm::cmd_delete(cfg);
        }
        if (verify->parsed()) {
            cfg.command = "verify";
            return dqm::cmd_verify_all(cfg);
        }
        if (catalog->parsed()) {
            cfg.command = "catalog";
            cfg.family = "catalog";
            dqm::emit(cfg, dqm::catalog_json(), ".json");
            return 0;
        }
        if (kernel->parsed()) {
            cfg.command = "kernel";
            if (cfg.family.empty()) throw dqm::OutOfDomain("family", "--family is required");
            return dqm::cmd_kernel(cfg);
        }
    } catch (const dqm::OutOfDomain& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const dqm::PreconditionViolated& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 2;
    } catch (const dqm::Error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
