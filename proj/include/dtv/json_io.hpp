#pragma once

#include <json.hpp>

#include "dtv/classifier.hpp"
#include "dtv/monodromy.hpp"
#include "dtv/operators.hpp"
#include "dtv/potentials.hpp"

namespace dtv {

using ordered_json = nlohmann::ordered_json;

namespace detail {

template <class S>
ordered_json scalar_json(const S& v) {
    return format_scalar(v);
}

template <class S>
S scalar_from(const ordered_json& j) {
    if (!j.is_string()) {
        throw std::domain_error("expected a scalar string, got: " + j.dump());
    }
    return parse_scalar<S>(j.get<std::string>());
}

} // namespace detail

template <class S>
ordered_json series_to_json(const LaurentSeries<S>& s) {
    ordered_json j;
    j["base_point"] = detail::scalar_json(s.base_point());
    j["min_degree"] = s.min_degree();
    ordered_json coeffs = ordered_json::array();
    for (int d = s.min_degree(); d <= s.trunc_order(); ++d) {
        coeffs.push_back(detail::scalar_json(s.coeff(d)));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

template <class S>
LaurentSeries<S> series_from_json(const ordered_json& j) {
    S base = detail::scalar_from<S>(j.at("base_point"));
    int min_degree = j.at("min_degree").get<int>();
    std::vector<S> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(detail::scalar_from<S>(c));
    if (coeffs.empty()) throw std::domain_error("series JSON has no coefficients");
    return LaurentSeries<S>(std::move(base), min_degree, std::move(coeffs));
}

template <class S>
ordered_json lattice_to_json(const Lattice<S>& lat) {
    ordered_json j;
    if (lat.omega) {
        j["omega1"] = detail::scalar_json((*lat.omega)[0]);
        j["omega2"] = detail::scalar_json((*lat.omega)[1]);
    } else {
        j["omega1"] = nullptr;
        j["omega2"] = nullptr;
    }
    j["g2"] = detail::scalar_json(lat.g2);
    j["g3"] = detail::scalar_json(lat.g3);
    j["e"] = ordered_json::array(
        {detail::scalar_json(lat.e[0]), detail::scalar_json(lat.e[1]),
         detail::scalar_json(lat.e[2])});
    return j;
}

/// Lattices deserialize through their invariants so every derived field
/// is rebuilt and validated.
template <class S>
Lattice<S> lattice_from_json(const ordered_json& j) {
    return lattice_from_invariants<S>(detail::scalar_from<S>(j.at("g2")),
                                      detail::scalar_from<S>(j.at("g3")));
}

template <class S>
ordered_json potential_to_json(const PotentialSpec<S>& spec) {
    ordered_json j;
    if (const auto* d = std::get_if<DtvPotential<S>>(&spec)) {
        j["variant"] = "dtv";
        j["lattice"] = lattice_to_json(d->lattice);
        ordered_json alpha = ordered_json::array();
        for (const auto& a : d->alpha) alpha.push_back(detail::scalar_json(a));
        j["alpha"] = std::move(alpha);
        if (d->m) {
            j["m"] = ordered_json::array({(*d->m)[0], (*d->m)[1], (*d->m)[2], (*d->m)[3]});
        } else {
            j["m"] = nullptr;
        }
        j["shift"] = detail::scalar_json(d->shift);
    } else if (const auto* t = std::get_if<TrigPotential<S>>(&spec)) {
        j["variant"] = "trig";
        j["a"] = detail::scalar_json(t->a);
        j["alpha0"] = detail::scalar_json(t->alpha0);
        j["alpha1"] = detail::scalar_json(t->alpha1);
        j["alpha2"] = detail::scalar_json(t->alpha2);
        if (t->m) {
            j["m"] = ordered_json::array({(*t->m)[0], (*t->m)[1]});
        } else {
            j["m"] = nullptr;
        }
        j["shift"] = detail::scalar_json(t->shift);
    } else if (const auto* r = std::get_if<RatPotential<S>>(&spec)) {
        j["variant"] = "rat";
        j["alpha0"] = detail::scalar_json(r->alpha0);
        j["alpha1"] = detail::scalar_json(r->alpha1);
        if (r->m) {
            j["m"] = *r->m;
        } else {
            j["m"] = nullptr;
        }
        j["shift"] = detail::scalar_json(r->shift);
    } else {
        const auto& tm = std::get<TrigMultiPotential<S>>(spec);
        j["variant"] = "trig_multi";
        j["a"] = detail::scalar_json(tm.a);
        ordered_json sites = ordered_json::array();
        for (const auto& s : tm.sites) sites.push_back(detail::scalar_json(s));
        j["sites"] = std::move(sites);
        j["m"] = tm.m;
        j["const"] = detail::scalar_json(tm.constant);
    }
    return j;
}

template <class S>
PotentialSpec<S> potential_from_json(const ordered_json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "dtv") {
        DtvPotential<S> d;
        d.lattice = lattice_from_json<S>(j.at("lattice"));
        const auto& alpha = j.at("alpha");
        if (alpha.size() != 5) throw std::domain_error("dtv potential needs 5 alphas");
        for (std::size_t i = 0; i < 5; ++i) d.alpha[i] = detail::scalar_from<S>(alpha[i]);
        if (j.contains("m") && !j.at("m").is_null()) {
            std::array<long, 4> m{};
            for (std::size_t i = 0; i < 4; ++i) m[i] = j.at("m").at(i).get<long>();
            d.m = m;
        }
        if (j.contains("shift")) d.shift = detail::scalar_from<S>(j.at("shift"));
        return d;
    }
    if (variant == "trig") {
        TrigPotential<S> t;
        t.a = detail::scalar_from<S>(j.at("a"));
        t.alpha0 = detail::scalar_from<S>(j.at("alpha0"));
        t.alpha1 = detail::scalar_from<S>(j.at("alpha1"));
        t.alpha2 = detail::scalar_from<S>(j.at("alpha2"));
        if (j.contains("m") && !j.at("m").is_null()) {
            t.m = std::array<long, 2>{j.at("m").at(0).get<long>(), j.at("m").at(1).get<long>()};
        }
        if (j.contains("shift")) t.shift = detail::scalar_from<S>(j.at("shift"));
        return t;
    }
    if (variant == "rat") {
        RatPotential<S> r;
        r.alpha0 = detail::scalar_from<S>(j.at("alpha0"));
        r.alpha1 = detail::scalar_from<S>(j.at("alpha1"));
        if (j.contains("m") && !j.at("m").is_null()) r.m = j.at("m").get<long>();
        if (j.contains("shift")) r.shift = detail::scalar_from<S>(j.at("shift"));
        return r;
    }
    if (variant == "trig_multi") {
        TrigMultiPotential<S> tm;
        tm.a = detail::scalar_from<S>(j.at("a"));
        for (const auto& s : j.at("sites")) tm.sites.push_back(detail::scalar_from<S>(s));
        for (const auto& m : j.at("m")) tm.m.push_back(m.get<long>());
        if (tm.m.size() != tm.sites.size()) {
            throw std::domain_error("trig_multi: sites and labels differ in length");
        }
        if (j.contains("const")) tm.constant = detail::scalar_from<S>(j.at("const"));
        return tm;
    }
    throw std::domain_error("unknown potential variant: " + variant);
}

template <class S>
ordered_json verdict_to_json(const PoleVerdict<S>& v) {
    ordered_json j;
    j["pole_class"] = v.pole_class;
    if (v.pole_point) {
        j["pole_point"] = detail::scalar_json(*v.pole_point);
    } else {
        j["pole_point"] = nullptr;
    }
    j["c_minus2"] = detail::scalar_json(v.c_minus2);
    if (v.m) {
        j["m"] = *v.m;
    } else {
        j["m"] = nullptr;
    }
    ordered_json odd = ordered_json::array();
    for (const auto& [k, c] : v.odd_residuals) {
        odd.push_back(ordered_json::array({k, detail::scalar_json(c)}));
    }
    j["odd_residuals"] = std::move(odd);
    j["verdict"] = to_string(v.verdict);
    return j;
}

template <class S>
ordered_json report_to_json(const MonodromyReport<S>& r) {
    ordered_json j;
    j["spec"] = potential_to_json(r.spec);
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(verdict_to_json(v));
    j["verdicts"] = std::move(verdicts);
    j["overall"] = r.overall;
    j["lambda_seed"] = r.lambda_seed;
    return j;
}

template <class S>
ordered_json operator_to_json(const DiffOperator<S>& op) {
    ordered_json j;
    j["order"] = op.order();
    j["base_point"] = detail::scalar_json(op.base_point());
    j["monic"] = op.is_monic();
    ordered_json coeffs = ordered_json::array();
    for (int k = 0; k <= op.order(); ++k) coeffs.push_back(series_to_json(op.coeff(k)));
    j["coeffs"] = std::move(coeffs);
    return j;
}

template <class S>
ordered_json curve_to_json(const SpectralCurve<S>& c) {
    ordered_json j;
    j["degree"] = c.degree;
    ordered_json coeffs = ordered_json::array();
    for (const auto& v : c.coeffs) coeffs.push_back(detail::scalar_json(v));
    j["coeffs"] = std::move(coeffs);
    if (!c.roots.empty()) {
        ordered_json roots = ordered_json::array();
        for (const auto& r : c.roots) roots.push_back(format_scalar(r));
        j["roots"] = std::move(roots);
    }
    j["genus_bound"] = c.genus_bound;
    return j;
}

template <class S>
ordered_json singular_class_to_json(const SingularClass<S>& cls) {
    ordered_json j;
    j["tag"] = to_string(cls.tag);
    j["z0"] = detail::scalar_json(cls.z0);
    if (cls.omega) j["omega"] = detail::scalar_json(*cls.omega);
    if (cls.basis) {
        j["basis"] = ordered_json::array({detail::scalar_json((*cls.basis)[0]),
                                          detail::scalar_json((*cls.basis)[1])});
    }
    j["commensurability_cutoff_hit"] = cls.commensurability_cutoff_hit;
    return j;
}

template <class S>
ordered_json family_template_to_json(const FamilyTemplate<S>& t) {
    ordered_json j;
    j["family"] = t.family;
    j["z0"] = detail::scalar_json(t.z0);
    if (t.step) j["step"] = detail::scalar_json(*t.step);
    if (t.basis) {
        j["basis"] = ordered_json::array({detail::scalar_json((*t.basis)[0]),
                                          detail::scalar_json((*t.basis)[1])});
    }
    j["free_alpha_count"] = t.free_alpha_count;
    return j;
}

template <class S>
ordered_json frobenius_to_json(const FrobeniusBasis<S>& b) {
    ordered_json j;
    j["exponents"] = ordered_json::array(
        {detail::scalar_json(b.exponents[0]), detail::scalar_json(b.exponents[1])});
    j["psi1"] = series_to_json(b.psi1);
    j["psi2"] = series_to_json(b.psi2);
    j["log_required"] = b.log_required;
    j["obstruction"] = detail::scalar_json(b.obstruction);
    return j;
}

} // namespace dtv
