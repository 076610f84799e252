#include "ultraheat/config.hpp"

#include <set>

#include "ultraheat/errors.hpp"

namespace ultraheat {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed)
{
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& path)
{
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

long long get_integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<long long>();
}

std::string get_string(const json& j, const std::string& path)
{
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

template <class T, class F>
void read(const json& obj, const std::string& path, const char* key, T& out, F convert)
{
    if (auto it = obj.find(key); it != obj.end()) out = convert(*it, join(path, key));
}

void read_number(const json& obj, const std::string& path, const char* key, double& out)
{
    read(obj, path, key, out, get_number);
}

template <class I>
void read_integer(const json& obj, const std::string& path, const char* key, I& out)
{
    read(obj, path, key, out, [](const json& j, const std::string& p) { return static_cast<I>(get_integer(j, p)); });
}

std::vector<double> number_list(const json& j, const std::string& path)
{
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Coefficient parse_coefficient(const json& j, const std::string& path)
{
    require_object(j, path);
    reject_unknown(j, path, {"kind", "a", "c", "lipschitz"});
    Coefficient c;
    std::string kind = "constant";
    read(j, path, "kind", kind, get_string);
    try {
        c.kind = coefficient_kind_from_string(kind);
    } catch (const InvalidArgument& e) {
        throw ConfigError(join(path, "kind"), e.what());
    }
    read_number(j, path, "a", c.a);
    read_number(j, path, "c", c.c);
    if (auto it = j.find("lipschitz"); it != j.end() && !it->is_null())
        c.declared_lipschitz = get_number(*it, join(path, "lipschitz"));
    return c;
}

json coefficient_json(const Coefficient& c)
{
    json j{{"kind", to_string(c.kind)}, {"a", c.a}, {"c", c.c}};
    j["lipschitz"] = c.declared_lipschitz ? json(*c.declared_lipschitz) : json(nullptr);
    return j;
}

InitialDatum parse_u0(const json& j, const std::string& path)
{
    require_object(j, path);
    reject_unknown(j, path, {"kind", "value", "radius_exponent", "values"});
    InitialDatum d;
    std::string kind = "constant";
    read(j, path, "kind", kind, get_string);
    if (kind == "constant") {
        d.kind = InitialDatum::Kind::constant;
    } else if (kind == "indicator") {
        d.kind = InitialDatum::Kind::indicator;
    } else if (kind == "table") {
        d.kind = InitialDatum::Kind::table;
    } else {
        throw ConfigError(join(path, "kind"), "unknown initial datum kind '" + kind + "'");
    }
    read_number(j, path, "value", d.value);
    read_integer(j, path, "radius_exponent", d.radius_exponent);
    read(j, path, "values", d.table, number_list);
    if (d.kind == InitialDatum::Kind::table && d.table.empty()) throw ConfigError(join(path, "values"), "table needs values");
    return d;
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig parse_config(const json& j)
{
    require_object(j, "");
    reject_unknown(j, "",
                   {"command", "lattice", "symbol", "measure", "d_beta", "sigma", "b", "u0", "grid", "replicas", "seed",
                    "method", "picard_iterations", "times", "snapshots", "override_hypotheses", "tolerances", "output"});
    RunConfig c;
    read(j, "", "command", c.command, get_string);

    if (auto it = j.find("lattice"); it != j.end()) {
        const std::string path = "lattice";
        require_object(*it, path);
        reject_unknown(*it, path, {"p", "N", "M", "m"});
        read_integer(*it, path, "p", c.lattice.p);
        read_integer(*it, path, "N", c.lattice.dimension);
        read_integer(*it, path, "M", c.lattice.support);
        read_integer(*it, path, "m", c.lattice.resolution);
        if (!is_prime(c.lattice.p)) throw ConfigError("lattice.p", "p must be prime");
        if (c.lattice.dimension < 1) throw ConfigError("lattice.N", "N must be >= 1");
        if (c.lattice.support < 0) throw ConfigError("lattice.M", "M must be >= 0");
        if (c.lattice.resolution < 0) throw ConfigError("lattice.m", "m must be >= 0");
    }

    if (auto it = j.find("symbol"); it != j.end()) {
        const std::string path = "symbol";
        require_object(*it, path);
        reject_unknown(*it, path, {"terms", "beta"});
        read_number(*it, path, "beta", c.symbol_beta);
        if (auto t = it->find("terms"); t != it->end()) {
            if (!t->is_array()) throw ConfigError("symbol.terms", "expected an array");
            for (std::size_t i = 0; i < t->size(); ++i) {
                const std::string tp = "symbol.terms[" + std::to_string(i) + "]";
                const json& term = (*t)[i];
                require_object(term, tp);
                reject_unknown(term, tp, {"exponents", "coefficient"});
                Monomial m;
                if (auto e = term.find("exponents"); e != term.end()) {
                    for (double v : number_list(*e, join(tp, "exponents"))) m.exponents.push_back(static_cast<int>(v));
                } else {
                    throw ConfigError(join(tp, "exponents"), "missing");
                }
                read_integer(term, tp, "coefficient", m.coefficient);
                c.symbol_terms.push_back(std::move(m));
            }
        }
    }
    if (c.symbol_terms.empty()) {
        const auto s = c.lattice.dimension == 1 ? EllipticSymbol::linear(c.lattice.p, c.symbol_beta)
                                                : EllipticSymbol::sum_of_squares(c.lattice.p, c.lattice.dimension, c.symbol_beta);
        c.symbol_terms = s.terms();
    }

    if (auto it = j.find("measure"); it != j.end()) {
        const std::string path = "measure";
        require_object(*it, path);
        reject_unknown(*it, path, {"kind", "alpha", "beta", "truncate", "atoms"});
        read(*it, path, "kind", c.measure.kind, get_string);
        try {
            measure_kind_from_string(c.measure.kind);
        } catch (const InvalidArgument& e) {
            throw ConfigError("measure.kind", e.what());
        }
        read_number(*it, path, "alpha", c.measure.alpha);
        read_number(*it, path, "beta", c.measure.beta);
        if (auto t = it->find("truncate"); t != it->end() && !t->is_null())
            c.measure.truncate = static_cast<int>(get_integer(*t, "measure.truncate"));
        if (auto a = it->find("atoms"); a != it->end()) {
            if (!a->is_array()) throw ConfigError("measure.atoms", "expected an array");
            for (std::size_t i = 0; i < a->size(); ++i) {
                const std::string ap = "measure.atoms[" + std::to_string(i) + "]";
                const json& atom = (*a)[i];
                require_object(atom, ap);
                reject_unknown(atom, ap, {"xi", "mass"});
                AtomConfig ac;
                if (auto x = atom.find("xi"); x != atom.end() && x->is_array()) {
                    for (std::size_t k = 0; k < x->size(); ++k) {
                        const std::string xp = join(ap, "xi") + "[" + std::to_string(k) + "]";
                        ac.xi.push_back((*x)[k].is_string() ? (*x)[k].get<std::string>()
                                                            : std::to_string(get_integer((*x)[k], xp)));
                    }
                } else {
                    throw ConfigError(join(ap, "xi"), "expected an array of rationals");
                }
                read_number(atom, ap, "mass", ac.mass);
                c.measure.atoms.push_back(std::move(ac));
            }
        }
    }

    if (auto it = j.find("d_beta"); it != j.end() && !it->is_null()) c.d_beta = get_number(*it, "d_beta");
    if (auto it = j.find("sigma"); it != j.end()) c.sigma = parse_coefficient(*it, "sigma");
    if (auto it = j.find("b"); it != j.end()) c.b = parse_coefficient(*it, "b");
    if (auto it = j.find("u0"); it != j.end()) c.u0 = parse_u0(*it, "u0");

    if (auto it = j.find("grid"); it != j.end()) {
        require_object(*it, "grid");
        reject_unknown(*it, "grid", {"T", "steps"});
        read_number(*it, "grid", "T", c.horizon);
        read_integer(*it, "grid", "steps", c.steps);
        if (!(c.horizon > 0)) throw ConfigError("grid.T", "T must be positive");
        if (c.steps < 1) throw ConfigError("grid.steps", "steps must be >= 1");
    }
    read_integer(j, "", "replicas", c.replicas);
    if (c.replicas < 1) throw ConfigError("replicas", "replicas must be >= 1");
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<long long>() < 0))
            throw ConfigError("seed", "expected a nonnegative integer");
        c.seed = it->get<std::uint64_t>();
    }
    read(j, "", "method", c.method, get_string);
    if (c.method != "stepper" && c.method != "picard") throw ConfigError("method", "expected 'stepper' or 'picard'");
    read_integer(j, "", "picard_iterations", c.picard_iterations);
    if (c.picard_iterations < 1) throw ConfigError("picard_iterations", "must be >= 1");
    read(j, "", "times", c.times, number_list);
    for (double t : c.times)
        if (!(t > 0)) throw ConfigError("times", "kernel times must be positive");
    read(j, "", "snapshots", c.snapshots, number_list);
    if (auto it = j.find("override_hypotheses"); it != j.end()) {
        if (!it->is_boolean()) throw ConfigError("override_hypotheses", "expected a boolean");
        c.override_hypotheses = it->get<bool>();
    }
    if (auto it = j.find("tolerances"); it != j.end()) {
        require_object(*it, "tolerances");
        reject_unknown(*it, "tolerances", {"mass", "positivity", "semigroup", "oracle", "se_factor"});
        read_number(*it, "tolerances", "mass", c.tolerances.mass);
        read_number(*it, "tolerances", "positivity", c.tolerances.positivity);
        read_number(*it, "tolerances", "semigroup", c.tolerances.semigroup);
        read_number(*it, "tolerances", "oracle", c.tolerances.oracle);
        read_number(*it, "tolerances", "se_factor", c.tolerances.se_factor);
    }
    read(j, "", "output", c.output, get_string);
    return c;
}

json to_json(const RunConfig& c)
{
    json terms = json::array();
    for (const auto& m : c.symbol_terms) terms.push_back({{"exponents", m.exponents}, {"coefficient", m.coefficient}});
    json atoms = json::array();
    for (const auto& a : c.measure.atoms) atoms.push_back({{"xi", a.xi}, {"mass", a.mass}});
    json j;
    j["command"] = c.command;
    j["lattice"] = {{"p", c.lattice.p}, {"N", c.lattice.dimension}, {"M", c.lattice.support}, {"m", c.lattice.resolution}};
    j["symbol"] = {{"terms", terms}, {"beta", c.symbol_beta}};
    j["measure"] = {{"kind", c.measure.kind}, {"alpha", c.measure.alpha}, {"beta", c.measure.beta}, {"atoms", atoms}};
    j["measure"]["truncate"] = c.measure.truncate ? json(*c.measure.truncate) : json(nullptr);
    j["d_beta"] = c.d_beta ? json(*c.d_beta) : json(nullptr);
    j["sigma"] = coefficient_json(c.sigma);
    j["b"] = coefficient_json(c.b);
    j["u0"] = {{"kind", to_string(c.u0.kind)},
               {"value", c.u0.value},
               {"radius_exponent", c.u0.radius_exponent},
               {"values", c.u0.table}};
    j["grid"] = {{"T", c.horizon}, {"steps", c.steps}};
    j["replicas"] = c.replicas;
    j["seed"] = c.seed;
    j["method"] = c.method;
    j["picard_iterations"] = c.picard_iterations;
    j["times"] = c.times;
    j["snapshots"] = c.snapshots;
    j["override_hypotheses"] = c.override_hypotheses;
    j["tolerances"] = {{"mass", c.tolerances.mass},
                       {"positivity", c.tolerances.positivity},
                       {"semigroup", c.tolerances.semigroup},
                       {"oracle", c.tolerances.oracle},
                       {"se_factor", c.tolerances.se_factor}};
    j["output"] = c.output;
    return j;
}

std::string emit_config(const RunConfig& c)
{
    return to_json(c).dump(2) + "\n";
}

EllipticSymbol build_symbol(const RunConfig& c)
{
    return EllipticSymbol(c.lattice.p, c.lattice.dimension, c.symbol_terms, c.symbol_beta);
}

SpectralMeasure build_measure(const RunConfig& c)
{
    const auto& m = c.measure;
    const std::int64_t p = c.lattice.p;
    const int n = c.lattice.dimension;
    SpectralMeasure mu = SpectralMeasure::white(p, n);
    switch (measure_kind_from_string(m.kind)) {
    case MeasureKind::white: break;
    case MeasureKind::power: mu = SpectralMeasure::riesz(p, n, m.alpha); break;
    case MeasureKind::bessel: mu = SpectralMeasure::bessel(p, n, m.alpha); break;
    case MeasureKind::heat: mu = SpectralMeasure::heat(p, n, m.beta); break;
    case MeasureKind::atoms: {
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < m.atoms.size(); ++i) {
            std::vector<Rational> xi;
            for (const auto& s : m.atoms[i].xi) {
                try {
                    xi.emplace_back(s);
                } catch (const std::exception&) {
                    throw ConfigError("measure.atoms[" + std::to_string(i) + "].xi", "bad rational '" + s + "'");
                }
            }
            atoms.push_back({PAdicVector(p, std::move(xi)), m.atoms[i].mass});
        }
        return SpectralMeasure::atomic(p, n, std::move(atoms));
    }
    }
    if (m.truncate) mu = mu.truncated(*m.truncate);
    return mu;
}

ModelSpec build_model_spec(const RunConfig& c)
{
    return ModelSpec{build_symbol(c), build_measure(c), c.sigma, c.b, c.u0, c.horizon, c.steps, c.lattice, c.replicas,
                     c.seed};
}

} // namespace ultraheat
