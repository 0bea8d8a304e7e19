// Command-line front end for the finite-gap potential toolkit: build
// potentials, certify trivial monodromy, search for commuting operators,
// extract spectral curves, classify singular sets, and run sweeps.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dtv/json_io.hpp"

namespace {

using dtv::ordered_json;

struct GlobalOpts {
    std::string mode = "float";
    int precision_bits = 53;
    int trunc_order = 64;
    double epsilon = 1e-9;
    std::uint64_t seed = 0;
    std::string output = "json";
};

struct CmdOpts {
    std::string dtv_m, dtv_alphas, g2, g3;
    std::string trig_alphas, a = "1";
    std::string rat_alpha;
    std::string alpha0 = "0";
    std::string spec_file;

    int order = 0; // 0 = choose automatically
    int pole = 0;
    bool frobenius = false;
    std::string zstar;
    int max_order = 9;
    std::string points;
    bool with_template = false;
    std::string u_json, psi0_json;
    long chain_step = -1;
    double k_modulus = 0.5;
    int sweep_max_m = 4;
    int with_commute = 0;
};

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open file: " + path);
    ordered_json j;
    in >> j;
    return j;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    return out;
}

std::vector<long> parse_longs(const std::string& s, std::size_t expect) {
    auto parts = split_list(s);
    if (parts.size() != expect) {
        throw std::domain_error("expected " + std::to_string(expect) +
                                " comma-separated integers, got: " + s);
    }
    std::vector<long> out;
    for (const auto& p : parts) out.push_back(std::stol(p));
    return out;
}

template <class S>
std::vector<S> parse_scalars(const std::string& s, std::size_t expect) {
    auto parts = split_list(s);
    if (expect && parts.size() != expect) {
        throw std::domain_error("expected " + std::to_string(expect) +
                                " comma-separated values, got: " + s);
    }
    std::vector<S> out;
    for (const auto& p : parts) out.push_back(dtv::parse_scalar<S>(p));
    return out;
}

template <class S>
dtv::Lattice<S> build_lattice(const CmdOpts& c) {
    if (c.g2.empty() || c.g3.empty()) {
        throw std::domain_error("an elliptic potential needs --g2 and --g3");
    }
    return dtv::lattice_from_invariants<S>(dtv::parse_scalar<S>(c.g2),
                                           dtv::parse_scalar<S>(c.g3));
}

template <class S>
dtv::PotentialSpec<S> build_potential(const CmdOpts& c) {
    using traits = dtv::scalar_traits<S>;
    const S alpha0 = dtv::parse_scalar<S>(c.alpha0);
    if (!c.spec_file.empty()) {
        return dtv::potential_from_json<S>(read_json_file(c.spec_file));
    }
    if (!c.dtv_m.empty()) {
        auto m = parse_longs(c.dtv_m, 4);
        return dtv::dtv_build<S>({m[0], m[1], m[2], m[3]}, build_lattice<S>(c), alpha0);
    }
    if (!c.dtv_alphas.empty()) {
        auto alphas = parse_scalars<S>(c.dtv_alphas, 5);
        dtv::DtvPotential<S> d;
        d.lattice = build_lattice<S>(c);
        for (std::size_t i = 0; i < 5; ++i) d.alpha[i] = alphas[i];
        return d;
    }
    if (!c.trig_alphas.empty()) {
        auto alphas = parse_scalars<S>(c.trig_alphas, 2);
        dtv::TrigPotential<S> t;
        t.a = dtv::parse_scalar<S>(c.a);
        t.alpha0 = alpha0;
        t.alpha1 = alphas[0];
        t.alpha2 = alphas[1];
        auto m1 = dtv::detail::triangular_label(t.alpha1, 1e-9, 1.0);
        auto m2 = dtv::detail::triangular_label(t.alpha2, 1e-9, 1.0);
        if (m1 && m2) t.m = std::array<long, 2>{*m1, *m2};
        return t;
    }
    if (!c.rat_alpha.empty()) {
        dtv::RatPotential<S> r;
        r.alpha0 = alpha0;
        r.alpha1 = dtv::parse_scalar<S>(c.rat_alpha);
        r.m = dtv::detail::triangular_label(r.alpha1, 1e-9, 1.0);
        return r;
    }
    (void)traits::is_exact;
    throw std::domain_error(
        "no potential given: use --dtv/--dtv-alphas, --trig, --rat, or --spec");
}

/// Deterministic regular base point away from the poles.
template <class S>
S default_base_point(const dtv::PotentialSpec<S>& spec) {
    using traits = dtv::scalar_traits<S>;
    if (const auto* d = std::get_if<dtv::DtvPotential<S>>(&spec)) {
        if (!d->lattice.omega) {
            throw std::domain_error(
                "a base point for an elliptic potential needs floating mode (or pass --z-star)");
        }
        return d->shift + ((*d->lattice.omega)[0] + (*d->lattice.omega)[1]) /
                              traits::from_int(5);
    }
    if (const auto* t = std::get_if<dtv::TrigPotential<S>>(&spec)) {
        if constexpr (traits::is_exact) {
            throw std::domain_error(
                "a base point for a trigonometric potential needs floating mode "
                "(or pass --z-star)");
        } else {
            using T = typename traits::real_type;
            return t->shift + S(T(M_PI)) / (T(5) * t->a);
        }
    }
    if (const auto* r = std::get_if<dtv::RatPotential<S>>(&spec)) {
        return r->shift + traits::one();
    }
    const auto& tm = std::get<dtv::TrigMultiPotential<S>>(spec);
    if constexpr (traits::is_exact) {
        throw std::domain_error("a base point for a trig-multi potential needs floating mode");
    } else {
        using T = typename traits::real_type;
        return tm.sites.at(0) + S(T(M_PI)) / (T(5) * tm.a);
    }
}

template <class S>
dtv::DiffOperator<S> build_schrodinger(const GlobalOpts& g, const CmdOpts& c) {
    if (!c.u_json.empty()) {
        return dtv::schrodinger_from_series(
            dtv::series_from_json<S>(read_json_file(c.u_json)));
    }
    auto spec = build_potential<S>(c);
    S zstar = c.zstar.empty() ? default_base_point(spec) : dtv::parse_scalar<S>(c.zstar);
    int order = c.order > 0 ? c.order : g.trunc_order;
    return dtv::schrodinger_from(spec, zstar, order);
}

template <class S>
int cmd_expand(const GlobalOpts& g, const CmdOpts& c) {
    auto spec = build_potential<S>(c);
    int order = c.order > 0 ? c.order : g.trunc_order;
    emit(dtv::series_to_json(dtv::potential_series_at_pole(spec, c.pole, order)));
    return 0;
}

template <class S>
int cmd_check(const GlobalOpts& g, const CmdOpts& c) {
    auto spec = build_potential<S>(c);
    auto report = dtv::trivial_monodromy_report(spec, c.order, g.epsilon, g.seed);
    auto j = dtv::report_to_json(report);
    if (c.frobenius) {
        auto lambdas = dtv::sample_lambdas<S>(g.seed, 8);
        for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
            ordered_json fj;
            if (!report.verdicts[i].m) {
                fj["skipped"] = "no integer label at this pole";
            } else {
                const long m = *report.verdicts[i].m;
                const int order = std::max<int>(8, static_cast<int>(2 * m + 6));
                auto local = dtv::potential_series_at_pole(spec, static_cast<int>(i), order);
                ordered_json lams = ordered_json::array();
                ordered_json logs = ordered_json::array();
                for (const auto& lam : lambdas) {
                    auto basis = dtv::frobenius_solve(local, lam, order, g.epsilon);
                    lams.push_back(dtv::format_scalar(lam));
                    logs.push_back(basis.log_required);
                }
                fj["lambdas"] = std::move(lams);
                fj["log_required"] = std::move(logs);
            }
            j["verdicts"][i]["frobenius"] = std::move(fj);
        }
    }
    emit(j);
    return 0;
}

template <class S>
int cmd_commute(const GlobalOpts& g, const CmdOpts& c, bool spectral) {
    if (c.max_order < 1 || c.max_order % 2 == 0) {
        throw std::domain_error("--max-order must be odd and positive");
    }
    auto L = build_schrodinger<S>(g, c);
    auto res = dtv::find_commuting(L, c.max_order, g.epsilon);
    ordered_json j;
    j["found"] = res.op.has_value();
    if (res.op) {
        j["minimal_order"] = res.minimal_order;
        if (spectral) {
            j["spectral"] = dtv::curve_to_json(dtv::spectral_polynomial(L, *res.op, g.epsilon));
        } else {
            j["operator"] = dtv::operator_to_json(*res.op);
        }
    } else {
        j["none_up_to"] = res.searched_up_to;
    }
    emit(j);
    return 0;
}

template <class S>
int cmd_classify(const GlobalOpts& g, const CmdOpts& c) {
    if (c.points.empty()) throw std::domain_error("--points is required");
    auto pts = parse_scalars<S>(c.points, 0);
    auto cls = dtv::classify_singular_set<S>(pts, g.epsilon);
    auto j = dtv::singular_class_to_json(cls);
    if (c.with_template && cls.tag != dtv::SingularTag::NonDiscrete) {
        j["template"] = dtv::family_template_to_json(dtv::family_template(cls));
    }
    emit(j);
    return 0;
}

template <class S>
int cmd_darboux(const GlobalOpts& g, const CmdOpts& c) {
    using traits = dtv::scalar_traits<S>;
    int order = c.order > 0 ? c.order : g.trunc_order;
    std::optional<dtv::LaurentSeries<S>> u, psi;
    if (c.chain_step >= 0) {
        // Canonical ladder step: u = m(m+1) a^2/sin^2(a t), psi = sin^{m+1}(a t).
        const S a = dtv::parse_scalar<S>(c.a);
        const long m = c.chain_step;
        auto s = dtv::sin_series(a, order + 2 * static_cast<int>(m) + 4);
        auto p = dtv::LaurentSeries<S>::constant(traits::zero(), traits::one(),
                                                 s.trunc_order());
        for (long i = 0; i <= m; ++i) p = p * s;
        psi = p;
        if (m == 0) {
            u = dtv::LaurentSeries<S>::zero(traits::zero(), order + 2);
        } else {
            u = dtv::detail::triangular<S>(m) * dtv::inv_sin_sq_series(a, order + 2);
        }
    } else {
        if (c.psi0_json.empty()) {
            throw std::domain_error("darboux needs --psi0-json (or --chain-step)");
        }
        psi = dtv::series_from_json<S>(read_json_file(c.psi0_json));
        if (!c.u_json.empty()) {
            u = dtv::series_from_json<S>(read_json_file(c.u_json));
        } else {
            auto spec = build_potential<S>(c);
            u = dtv::potential_series_at_pole(spec, c.pole, psi->trunc_order() + 4);
        }
    }
    auto res = dtv::darboux_transform(*u, *psi, g.epsilon);
    ordered_json j;
    j["lambda0"] = dtv::format_scalar(res.lambda0);
    j["transformed"] = dtv::series_to_json(res.transformed);
    j["dg_check"] = dtv::verdict_to_json(dtv::dg_check(res.transformed, g.epsilon));
    emit(j);
    return 0;
}

template <class S>
int cmd_convert(const GlobalOpts&, const CmdOpts& c) {
    using traits = dtv::scalar_traits<S>;
    if constexpr (traits::is_exact) {
        throw std::domain_error("convert requires floating mode (elliptic integrals)");
    } else {
        using T = typename traits::real_type;
        if (c.dtv_m.empty()) throw std::domain_error("convert needs --m m0,m1,m2,m3");
        auto m = parse_longs(c.dtv_m, 4);
        auto res = dtv::jacobi_to_weierstrass<T>({m[0], m[1], m[2], m[3]},
                                                 static_cast<T>(c.k_modulus));
        ordered_json j;
        j["spec"] = dtv::potential_to_json(res.spec);
        j["lambda_shift"] = dtv::format_scalar(res.lambda_shift);
        emit(j);
        return 0;
    }
}

template <class S>
int cmd_sweep(const GlobalOpts& g, const CmdOpts& c) {
    using traits = dtv::scalar_traits<S>;
    CmdOpts base = c;
    if (base.g2.empty()) base.g2 = "4";
    if (base.g3.empty()) base.g3 = "0";
    auto lat = build_lattice<S>(base);
    const long mm = c.sweep_max_m;
    if (mm < 0) throw std::domain_error("--max-m must be nonnegative");
    if (c.with_commute > 0 && traits::is_exact) {
        throw std::domain_error("--with-commute needs floating mode (regular base point)");
    }

    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << "m0,m1,m2,m3,overall";
    for (int p = 0; p < 4; ++p) csv << ",verdict_" << p << ",m_" << p;
    if (c.with_commute > 0) csv << ",commute_order";
    csv << "\n";

    std::array<long, 4> m{};
    for (m[0] = 0; m[0] <= mm; ++m[0]) {
        for (m[1] = 0; m[1] <= mm; ++m[1]) {
            for (m[2] = 0; m[2] <= mm; ++m[2]) {
                for (m[3] = 0; m[3] <= mm; ++m[3]) {
                    auto spec = dtv::dtv_build<S>(m, lat);
                    auto report = dtv::trivial_monodromy_report(spec, c.order, g.epsilon, g.seed);
                    ordered_json row;
                    row["m"] = ordered_json::array({m[0], m[1], m[2], m[3]});
                    row["overall"] = report.overall;
                    ordered_json verdicts = ordered_json::array();
                    csv << m[0] << "," << m[1] << "," << m[2] << "," << m[3] << ","
                        << (report.overall ? "true" : "false");
                    for (const auto& v : report.verdicts) {
                        verdicts.push_back(dtv::verdict_to_json(v));
                        csv << "," << dtv::to_string(v.verdict) << ","
                            << (v.m ? std::to_string(*v.m) : "");
                    }
                    row["verdicts"] = std::move(verdicts);
                    if (c.with_commute > 0) {
                        auto L = dtv::schrodinger_from(spec, default_base_point(spec),
                                                       g.trunc_order);
                        auto res = dtv::find_commuting(L, c.with_commute, g.epsilon);
                        if (res.op) {
                            row["commute_order"] = res.minimal_order;
                            csv << "," << res.minimal_order;
                        } else {
                            row["commute_order"] = nullptr;
                            csv << ",";
                        }
                    }
                    csv << "\n";
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    if (g.output == "csv") {
        std::cout << csv.str();
    } else {
        emit(rows);
    }
    return 0;
}

template <class S>
int run_mode(const std::string& sub, const GlobalOpts& g, const CmdOpts& c) {
    if (sub == "expand") return cmd_expand<S>(g, c);
    if (sub == "check") return cmd_check<S>(g, c);
    if (sub == "commute") return cmd_commute<S>(g, c, false);
    if (sub == "spectral") return cmd_commute<S>(g, c, true);
    if (sub == "classify") return cmd_classify<S>(g, c);
    if (sub == "darboux") return cmd_darboux<S>(g, c);
    if (sub == "convert") return cmd_convert<S>(g, c);
    if (sub == "sweep") return cmd_sweep<S>(g, c);
    throw std::domain_error("unknown subcommand: " + sub);
}

GlobalOpts load_config_defaults(int argc, char** argv) {
    GlobalOpts g;
    std::string path;
    for (int i = 1; i + 1 <= argc - 1; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) path = argv[i + 1];
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
    if (path.empty()) {
        if (const char* env = std::getenv("DTV_CONFIG")) path = env;
    }
    if (path.empty()) return g;
    auto j = read_json_file(path);
    if (j.contains("scalar_mode")) g.mode = j["scalar_mode"].get<std::string>();
    if (j.contains("precision_bits")) g.precision_bits = j["precision_bits"].get<int>();
    if (j.contains("trunc_order")) g.trunc_order = j["trunc_order"].get<int>();
    if (j.contains("epsilon")) g.epsilon = j["epsilon"].get<double>();
    if (j.contains("seed")) g.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output")) g.output = j["output"].get<std::string>();
    return g;
}

} // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    try {
        g = load_config_defaults(argc, argv);
    } catch (const std::exception& e) {
        ordered_json j;
        j["error"] = "domain_error";
        j["what"] = e.what();
        emit(j);
        return 2;
    }
    CmdOpts c;

    CLI::App app{"Finite-gap potential toolkit: Darboux-Treibich-Verdier families, "
                 "trivial-monodromy certification, commuting-operator search, "
                 "spectral curves, and singular-set classification"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (or DTV_CONFIG env var)");
    app.add_option("--mode", g.mode, "Scalar backend: exact | float")
        ->check(CLI::IsMember({"exact", "float"}))
        ->capture_default_str();
    app.add_option("--precision-bits", g.precision_bits,
                   "Floating mantissa bits (53 = double, up to 64 = long double)")
        ->capture_default_str();
    app.add_option("--trunc-order", g.trunc_order, "Default series truncation order")
        ->capture_default_str();
    app.add_option("--epsilon", g.epsilon, "Relative zero tolerance in floating mode")
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for spectral-parameter samples")
        ->capture_default_str();
    app.add_option("--output", g.output, "Output format: json | csv (sweep only)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    auto add_potential_opts = [&](CLI::App* sub) {
        sub->add_option("--dtv", c.dtv_m, "Elliptic potential labels m0,m1,m2,m3");
        sub->add_option("--dtv-alphas", c.dtv_alphas, "Raw elliptic coefficients a0,a1,a2,a3,a4");
        sub->add_option("--g2", c.g2, "Lattice invariant g2");
        sub->add_option("--g3", c.g3, "Lattice invariant g3");
        sub->add_option("--trig", c.trig_alphas, "Trigonometric coefficients alpha1,alpha2");
        sub->add_option("--a", c.a, "Trigonometric frequency");
        sub->add_option("--rat", c.rat_alpha, "Rational coefficient alpha1");
        sub->add_option("--alpha0", c.alpha0, "Additive constant");
        sub->add_option("--spec", c.spec_file, "Potential JSON file");
    };

    auto* expand = app.add_subcommand("expand", "Laurent expansion at a pole class");
    add_potential_opts(expand);
    expand->add_option("--pole", c.pole, "Pole-class index");
    expand->add_option("--order", c.order, "Truncation order of the expansion");

    auto* check = app.add_subcommand("check", "Trivial-monodromy certification");
    add_potential_opts(check);
    check->add_option("--order", c.order, "Expansion order (0 = automatic)");
    check->add_flag("--frobenius", c.frobenius,
                    "Also report logarithmic obstructions at sampled spectral values");

    auto* commute = app.add_subcommand("commute", "Search for a commuting odd-order operator");
    add_potential_opts(commute);
    commute->add_option("--u-json", c.u_json, "Potential expansion JSON (regular point)");
    commute->add_option("--z-star", c.zstar, "Regular base point");
    commute->add_option("--max-order", c.max_order, "Largest odd order to try");
    commute->add_option("--order", c.order, "Expansion order at the base point");

    auto* spectral = app.add_subcommand("spectral", "Spectral polynomial of the minimal pair");
    add_potential_opts(spectral);
    spectral->add_option("--u-json", c.u_json, "Potential expansion JSON (regular point)");
    spectral->add_option("--z-star", c.zstar, "Regular base point");
    spectral->add_option("--max-order", c.max_order, "Largest odd order to try");
    spectral->add_option("--order", c.order, "Expansion order at the base point");

    auto* classify = app.add_subcommand("classify", "Classify a reflection-closed singular set");
    classify->add_option("--points", c.points, "Comma-separated complex points");
    classify->add_flag("--template", c.with_template, "Include the matching family template");

    auto* darboux = app.add_subcommand("darboux", "Darboux transform of a potential expansion");
    add_potential_opts(darboux);
    darboux->add_option("--u-json", c.u_json, "Potential expansion JSON");
    darboux->add_option("--psi0-json", c.psi0_json, "Eigenfunction expansion JSON");
    darboux->add_option("--chain-step", c.chain_step,
                        "Canonical ladder step from m (uses --a)");
    darboux->add_option("--pole", c.pole, "Pole-class index for --spec potentials");
    darboux->add_option("--order", c.order, "Working truncation order");

    auto* convert = app.add_subcommand("convert", "Jacobi-form potential to Weierstrass form");
    convert->add_option("--m", c.dtv_m, "Labels m0,m1,m2,m3");
    convert->add_option("--k", c.k_modulus, "Jacobi modulus in (0, 1)");

    auto* sweep = app.add_subcommand("sweep", "Certification sweep over integer labels");
    sweep->add_option("--max-m", c.sweep_max_m, "Sweep each label over 0..max-m");
    sweep->add_option("--g2", c.g2, "Lattice invariant g2 (default 4)");
    sweep->add_option("--g3", c.g3, "Lattice invariant g3 (default 0)");
    sweep->add_option("--order", c.order, "Expansion order (0 = automatic)");
    sweep->add_option("--with-commute", c.with_commute,
                      "Also search commuting operators up to this odd order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (g.precision_bits < 53) {
            throw std::domain_error("precision_bits must be at least 53");
        }
        if (g.trunc_order < 8) {
            throw std::domain_error("trunc_order must be at least 8");
        }
        std::string sub = app.get_subcommands().at(0)->get_name();
        if (g.mode == "exact") {
            return run_mode<dtv::ExactScalar>(sub, g, c);
        }
        if (g.precision_bits <= 53) {
            return run_mode<std::complex<double>>(sub, g, c);
        }
        if (g.precision_bits <= 64) {
            return run_mode<std::complex<long double>>(sub, g, c);
        }
        throw std::domain_error("precision_bits beyond 64 is not supported by this build");
    } catch (const dtv::truncation_error& e) {
        ordered_json j;
        j["error"] = "truncation_refused";
        j["what"] = e.what();
        j["hint"] = ordered_json{{"required_trunc_order", e.required_trunc_order}};
        emit(j);
        return 3;
    } catch (const nlohmann::json::exception& e) {
        ordered_json j;
        j["error"] = "malformed_json";
        j["what"] = e.what();
        emit(j);
        return 2;
    } catch (const std::exception& e) {
        ordered_json j;
        j["error"] = "domain_error";
        j["what"] = e.what();
        emit(j);
        return 2;
    }
}
