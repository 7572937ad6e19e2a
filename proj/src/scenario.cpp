#include "twistjac/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace twistjac {

// One named structure: its JSON, a builder and the cached result.
struct Scenario::Entry {
    std::string kind;
    std::string ptr;
    Json def;
    std::vector<std::string> deps;   // other structures it refers to
    std::function<ScenarioObject()> build;
    mutable std::optional<ScenarioObject> value;
    mutable std::string error;
    mutable bool building = false;
};

namespace {

// ---------------------------------------------------------------------------
// JSON plumbing

std::string child(const std::string& ptr, const std::string& key)
{
    std::string k;
    for (char ch : key) {
        if (ch == '~') k += "~0";
        else if (ch == '/') k += "~1";
        else k += ch;
    }
    return ptr + "/" + k;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const Json& field(const Json& j, const std::string& key, const std::string& ptr)
{
    if (!j.is_object()) throw ScenarioError(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ScenarioError(ptr, "missing field '" + key + "'");
    return *it;
}

const Json* optional_field(const Json& j, const std::string& key)
{
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::string text_of(const Json& j, const std::string& ptr)
{
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ScenarioError(ptr, "expected an expression string");
}

std::string string_field(const Json& j, const std::string& key, const std::string& ptr)
{
    const Json& v = field(j, key, ptr);
    if (!v.is_string()) throw ScenarioError(child(ptr, key), "expected a string");
    return v.get<std::string>();
}

template <class F>
auto guarded(const std::string& ptr, F&& fn)
{
    try {
        return fn();
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(ptr, e.what());
    }
}

Expr expr_at(const Json& j, const Chart& chart, const std::string& ptr)
{
    const std::string s = text_of(j, ptr);
    return guarded(ptr, [&] { return parse_expr(s, chart); });
}

KeyedComponents keyed(const Json& j, const std::string& ptr)
{
    if (!j.is_object()) throw ScenarioError(ptr, "expected an object of components");
    KeyedComponents out;
    for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), text_of(it.value(), child(ptr, it.key())));
    return out;
}

// each value parsed on its own first, so errors point at the component
KeyedComponents keyed_on(const Json& j, const Chart& chart, const std::string& ptr)
{
    KeyedComponents kc = keyed(j, ptr);
    for (const auto& [k, v] : kc) (void)expr_at(Json(v), chart, child(ptr, k));
    return kc;
}

Form form_at(const Json* j, const ChartPtr& chart, int degree, const std::string& ptr)
{
    if (!j) return Form(chart, degree);
    const KeyedComponents kc = keyed_on(*j, *chart, ptr);
    return guarded(ptr, [&] { return parse_form(chart, degree, kc); });
}

MultiVector mv_at(const Json* j, const ChartPtr& chart, int degree, const std::string& ptr)
{
    if (!j) return MultiVector(chart, degree);
    const KeyedComponents kc = keyed_on(*j, *chart, ptr);
    return guarded(ptr, [&] { return parse_multivector(chart, degree, kc); });
}

template <class Tag>
Json tensor_json(const AltTensor<Tag>& t)
{
    Json out = Json::object();
    const Chart& c = *t.chart();
    for (std::size_t s = 0; s < t.size(); ++s) {
        if (t.comp(s).is_zero()) continue;
        const std::string key = std::is_same_v<Tag, FormTag> ? form_key(t.mask(s), c) : vector_key(t.mask(s), c);
        out[key] = t.comp(s).to_string(c);
    }
    return out;
}

Json map_json(const SmoothMap& f)
{
    Json out = Json::object();
    Json comps = Json::array();
    for (const auto& e : f.components) comps.push_back(e.to_string(*f.source));
    out["components"] = comps;
    if (f.has_section()) {
        Json sec = Json::array();
        for (const auto& e : f.section) sec.push_back(e.to_string(*f.target));
        out["section"] = sec;
    }
    return out;
}

SmoothMap map_at(const Json& j, const std::string& name, const ChartPtr& source, const ChartPtr& target,
                 const std::string& ptr)
{
    const Json& comps = j.is_array() ? j : field(j, "components", ptr);
    const std::string cptr = j.is_array() ? ptr : child(ptr, "components");
    if (!comps.is_array() || static_cast<int>(comps.size()) != target->dim())
        throw ScenarioError(cptr, "expected " + std::to_string(target->dim()) + " components for " + name);
    SmoothMap f;
    f.name = name;
    f.source = source;
    f.target = target;
    for (std::size_t i = 0; i < comps.size(); ++i) f.components.push_back(expr_at(comps[i], *source, child(cptr, i)));
    if (j.is_object())
        if (const Json* sec = optional_field(j, "section")) {
            const std::string sptr = child(ptr, "section");
            if (!sec->is_array() || static_cast<int>(sec->size()) != source->dim())
                throw ScenarioError(sptr, "expected " + std::to_string(source->dim()) + " section components");
            for (std::size_t i = 0; i < sec->size(); ++i)
                f.section.push_back(expr_at((*sec)[i], *target, child(sptr, i)));
        }
    return f;
}

const char* kind_name(const ScenarioObject& o)
{
    static constexpr const char* names[] = {"jacobi", "contact", "homogeneous", "groupoid",
                                            "suspended-groupoid", "apath", "multivector"};
    return names[o.index()];
}

std::vector<std::string> known_kinds()
{
    return {"jacobi", "contact", "homogeneous", "multivector", "groupoid", "suspended-groupoid", "apath"};
}

double number_param(const Json& def, const std::string& key, double fallback)
{
    const Json* v = optional_field(def, key);
    if (!v) return fallback;
    if (!v->is_number()) throw std::invalid_argument("parameter '" + key + "' must be a number");
    return v->get<double>();
}

// ---------------------------------------------------------------------------
// views

class Views {
public:
    explicit Views(const Scenario& sc) : sc_(sc) {}

    const ScenarioObject& get(const std::string& name) const { return sc_.object(name); }

    TwistedContact contact(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* c = std::get_if<TwistedContact>(&o)) return *c;
        throw std::invalid_argument(name + " is a " + kind_name(o) + ", not a contact structure");
    }

    TwistedJacobi jacobi(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* j = std::get_if<TwistedJacobi>(&o)) return *j;
        if (auto* c = std::get_if<TwistedContact>(&o)) return jacobi_from_contact(*c).J;
        throw std::invalid_argument(name + " is a " + kind_name(o) + ", not a Jacobi structure");
    }

    HomTwistedPoisson homogeneous(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* h = std::get_if<HomTwistedPoisson>(&o)) return *h;
        return poissonize(jacobi(name));
    }

    GroupoidModel groupoid(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* g = std::get_if<GroupoidModel>(&o)) return *g;
        if (auto* c = std::get_if<TwistedContact>(&o)) return build_pair_groupoid(*c);
        throw std::invalid_argument(name + " is a " + kind_name(o) + ", not a groupoid");
    }

    SuspendedModel suspended(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* s = std::get_if<SuspendedModel>(&o)) return *s;
        return suspend(groupoid(name)).S;
    }

    const APath& path(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* p = std::get_if<APath>(&o)) return *p;
        throw std::invalid_argument(name + " is a " + kind_name(o) + ", not an A-path");
    }

    MultiVector multivector(const std::string& name) const
    {
        const auto& o = get(name);
        if (auto* v = std::get_if<MultiVector>(&o)) return *v;
        throw std::invalid_argument(name + " is a " + kind_name(o) + ", not a multivector");
    }

private:
    const Scenario& sc_;
};

// ---------------------------------------------------------------------------
// checks

struct CheckContext {
    const Views& views;
    const Json& def;
    SampleConfig cfg;

    std::string object() const { return def.at("object").get<std::string>(); }
};

using CheckFn = std::function<Report(const CheckContext&)>;

CheckResult exact_result(const std::string& name, bool ok, const std::string& witness)
{
    CheckResult r;
    r.name = name;
    r.verdict = ok ? Verdict::SymbolicZero : Verdict::Fail;
    if (!ok) r.witness = witness;
    return r;
}

template <class Tag>
CheckResult same_tensor(const std::string& name, const AltTensor<Tag>& got, const AltTensor<Tag>& want)
{
    const bool ok = *got.chart() == *want.chart() && got.degree() == want.degree() && got.equals(want);
    return exact_result(name, ok, ok ? "" : "difference " + to_string(got - want));
}

CheckResult bounded(const std::string& name, double value, double bound, const std::string& detail)
{
    CheckResult r;
    r.name = name;
    r.max_residual = value;
    r.detail = detail;
    r.verdict = std::isfinite(value) && value <= bound ? Verdict::Pass : Verdict::Fail;
    if (r.verdict == Verdict::Fail) {
        std::ostringstream os;
        os << std::setprecision(6) << value << " exceeds " << bound << " (" << detail << ")";
        r.witness = os.str();
    }
    return r;
}

std::vector<PairSection> sections_param(const CheckContext& ctx, const ChartPtr& chart)
{
    const int n = chart->dim();
    std::vector<PairSection> out;
    if (const Json* s = optional_field(ctx.def, "sections")) {
        for (std::size_t i = 0; i < s->size(); ++i) {
            const Json& e = (*s)[i];
            const std::string ptr = "sections/" + std::to_string(i);
            out.emplace_back(form_at(optional_field(e, "zeta"), chart, 1, ptr + "/zeta"),
                             optional_field(e, "f") ? expr_at(e.at("f"), *chart, ptr + "/f") : Expr(n));
        }
        return out;
    }
    // (dx^k, 0), (0, 1) and one non-constant section x^0 dx^1
    for (int k = 0; k < n; ++k) out.emplace_back(Form::basis(chart, {k}), Expr(n));
    out.emplace_back(Form(chart, 1), Expr::constant(n, 1));
    if (n > 1) out.emplace_back(Form::basis(chart, {1}) * Expr::variable(n, 0), Expr(n));
    return out;
}

Report anomaly_check(const CheckContext& ctx)
{
    const TwistedJacobi J = ctx.views.jacobi(ctx.object());
    const Chart& c = *J.chart;
    std::vector<std::array<std::string, 3>> triples;
    if (const Json* t = optional_field(ctx.def, "triples")) {
        for (const auto& row : *t) triples.push_back({row.at(0).get<std::string>(), row.at(1).get<std::string>(),
                                                      row.at(2).get<std::string>()});
    } else {
        if (c.dim() < 3) throw std::invalid_argument("anomaly needs three functions; give 'triples'");
        triples.push_back({c.coords()[0], c.coords()[1], c.coords()[2]});
    }
    Report rep("Jacobi anomaly");
    const auto pts = sample_points(c.dim(), ctx.cfg);
    for (const auto& tr : triples) {
        const Anomaly a = jacobi_anomaly(J, parse_expr(tr[0], c), parse_expr(tr[1], c), parse_expr(tr[2], c));
        ResidualAccumulator acc("{f,{g,h}}+c.p. = rhs for (" + tr[0] + ", " + tr[1] + ", " + tr[2] + ")", c, pts,
                                ctx.cfg.tol, ctx.cfg.guard);
        acc.add(a.residual(), "residual");
        rep.add(acc.result());
    }
    return rep;
}

Report poissonization_check(const CheckContext& ctx)
{
    const TwistedJacobi J = ctx.views.jacobi(ctx.object());
    const HomTwistedPoisson H = poissonize(J);
    Report rep("Poissonization");
    rep.append(check_homogeneous(H, ctx.cfg));
    const std::string s = H.chart->coords().back();
    const Expr es = Expr::exp(Expr::variable(H.chart->dim(), H.chart->dim() - 1));
    const HomogeneousProjection P = project_homogeneous(H, s, 0, es, ctx.cfg);
    rep.append(P.report);
    rep.add(same_tensor("projection returns Lambda", P.J.Lambda, J.Lambda));
    rep.add(same_tensor("projection returns E", P.J.E, J.E));
    rep.add(same_tensor("projection returns omega", P.J.omega, J.omega));
    return rep;
}

Report contact_identities_check(const CheckContext& ctx)
{
    const TwistedContact C = ctx.views.contact(ctx.object());
    const ContactSolution sol = solve_contact(C);
    const MultiVector E = optional_field(ctx.def, "E") ? ctx.views.multivector(ctx.def.at("E")) : sol.E;
    const MultiVector L = optional_field(ctx.def, "Lambda") ? ctx.views.multivector(ctx.def.at("Lambda")) : sol.Lambda;
    if (E.degree() != 1 || L.degree() != 2 || !(*E.chart() == *C.chart) || !(*L.chart() == *C.chart))
        throw std::invalid_argument("E must be a vector field and Lambda a bivector on " + C.chart->name());
    return check_contact_identities(C, E, L, ctx.cfg);
}

Report strip_check(const CheckContext& ctx)
{
    const GroupoidModel G = ctx.views.groupoid(ctx.object());
    const Suspension S = suspend(G, ctx.cfg);
    const GroupoidModel H = strip(S.S, G);
    Report rep("strip(suspend)");
    rep.add(same_tensor("theta recovered", H.theta, G.theta));
    rep.add(same_tensor("omega recovered", H.omega, G.omega));
    rep.add(exact_result("r recovered", H.r.equals(G.r), "r = " + H.r.to_string(*G.total)));
    rep.add(same_tensor("omega0 recovered", H.omega0, G.omega0));
    rep.append(check_multiplicativity(H, ctx.cfg));
    return rep;
}

double expected_value(const Json& def)
{
    const Json& e = def.at("expect");
    if (e.is_number()) return e.get<double>();
    const Chart time("time", {"t"});
    const Expr v = parse_expr(e.get<std::string>(), time);
    if (!v.diff(0).is_zero()) throw std::invalid_argument("'expect' must be a constant");
    return v.eval(std::vector<double>{0.0});
}

Report cocycle_check(const CheckContext& ctx)
{
    const APath& c = ctx.views.path(ctx.object());
    const double got = cocycle_integral(c), want = expected_value(ctx.def);
    std::ostringstream os;
    os << std::setprecision(15) << "integral " << got << ", expected " << want << ", N = " << c.N;
    Report rep("cocycle integral");
    rep.add(bounded("r([c]) = expected", std::abs(got - want), number_param(ctx.def, "max_error", 1e-8), os.str()));
    return rep;
}

Report anchor_check(const CheckContext& ctx)
{
    const APath& c = ctx.views.path(ctx.object());
    Report rep("anchor");
    rep.add(bounded("rho(c) = gamma'", anchor_residual(c), number_param(ctx.def, "max_error", 1e-6),
                    "N = " + std::to_string(c.N)));
    return rep;
}

Report concatenation_check(const CheckContext& ctx)
{
    const Json& names = ctx.def.at("objects");
    const APath& a = ctx.views.path(names.at(0));
    const APath& b = ctx.views.path(names.at(1));
    const APath ab = concatenate(a, b);
    const double lhs = cocycle_integral(ab), rhs = cocycle_integral(a) + cocycle_integral(b);
    std::ostringstream os;
    os << std::setprecision(15) << "r(c1.c0) = " << lhs << ", r(c0) + r(c1) = " << rhs;
    Report rep("concatenation");
    rep.add(bounded("r(c1.c0) = r(c0) + r(c1)", std::abs(lhs - rhs), number_param(ctx.def, "max_error", 1e-8), os.str()));
    return rep;
}

Report reparameterization_check(const CheckContext& ctx)
{
    const APath& c = ctx.views.path(ctx.object());
    const Chart time("time", {"t"});
    const APath ct = reparameterize(c, parse_expr(ctx.def.at("tau").get<std::string>(), time));
    const double lhs = cocycle_integral(ct), rhs = cocycle_integral(c);
    std::ostringstream os;
    os << std::setprecision(15) << "r(c^tau) = " << lhs << ", r(c) = " << rhs;
    Report rep("reparameterization");
    rep.add(bounded("r(c^tau) = r(c)", std::abs(lhs - rhs), number_param(ctx.def, "max_error", 1e-6), os.str()));
    return rep;
}

Report convergence_check(const CheckContext& ctx)
{
    const APath& c = ctx.views.path(ctx.object());
    if (!c.formula) throw std::invalid_argument("convergence needs a closed-form path");
    const double want = expected_value(ctx.def);
    std::vector<int> levels{8, 16, 32, 64};
    if (const Json* l = optional_field(ctx.def, "levels")) levels = l->get<std::vector<int>>();
    const double min_factor = number_param(ctx.def, "min_factor", 8.0);
    Report rep("Simpson convergence");
    double prev = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double err = std::abs(cocycle_integral(sample_path(c.J, *c.formula, levels[i])) - want);
        if (i > 0) {
            CheckResult r;
            r.name = "error(" + std::to_string(levels[i - 1]) + ") / error(" + std::to_string(levels[i]) + ") >= " +
                     std::to_string(static_cast<int>(min_factor));
            const double factor = err == 0.0 ? INFINITY : prev / err;
            std::ostringstream os;
            os << std::setprecision(6) << "factor " << factor << " (errors " << prev << ", " << err << ")";
            r.detail = os.str();
            r.max_residual = err;
            r.verdict = factor >= min_factor ? Verdict::Pass : Verdict::Fail;
            if (r.verdict == Verdict::Fail) r.witness = r.detail;
            rep.add(r);
        }
        prev = err;
    }
    return rep;
}

const std::map<std::string, CheckFn>& registry()
{
    static const std::map<std::string, CheckFn> table = [] {
        std::map<std::string, CheckFn> t;
        t["contact"] = [](const CheckContext& c) {
            return check_contact(c.views.contact(c.object()), c.cfg, number_param(c.def, "threshold", 1e-6));
        };
        t["contact-identities"] = contact_identities_check;
        t["jacobi-from-contact"] = [](const CheckContext& c) { return jacobi_from_contact(c.views.contact(c.object()), c.cfg).report; };
        t["contact-poissonization"] = [](const CheckContext& c) {
            return contact_poissonization_check(c.views.contact(c.object()), c.cfg);
        };
        t["twisted-jacobi"] = [](const CheckContext& c) { return check_twisted_jacobi(c.views.jacobi(c.object()), c.cfg); };
        t["algebroid"] = [](const CheckContext& c) {
            const TwistedJacobi J = c.views.jacobi(c.object());
            return check_algebroid(J, sections_param(c, J.chart), c.cfg);
        };
        t["anomaly"] = anomaly_check;
        t["homogeneous"] = [](const CheckContext& c) { return check_homogeneous(c.views.homogeneous(c.object()), c.cfg); };
        t["poissonization"] = poissonization_check;
        t["project-along-E"] = [](const CheckContext& c) {
            const TwistedJacobi J = c.views.jacobi(c.object());
            const std::string coord = optional_field(c.def, "coord") ? c.def.at("coord").get<std::string>()
                                                                      : J.chart->coords().back();
            const std::string value = optional_field(c.def, "value") ? text_of(c.def.at("value"), "value") : "0";
            return project_along_E(J, coord, parse_rational(value), c.cfg).report;
        };
        t["groupoid-axioms"] = [](const CheckContext& c) { return check_groupoid_axioms(c.views.groupoid(c.object())); };
        t["multiplicativity"] = [](const CheckContext& c) {
            return check_multiplicativity(c.views.groupoid(c.object()), c.cfg);
        };
        t["volume"] = [](const CheckContext& c) {
            return check_volume(c.views.groupoid(c.object()), c.cfg, number_param(c.def, "threshold", 1e-6));
        };
        t["groupoid-jacobi"] = [](const CheckContext& c) { return groupoid_jacobi(c.views.groupoid(c.object()), c.cfg).report; };
        t["block-formulas"] = [](const CheckContext& c) {
            const GroupoidModel G = c.views.groupoid(c.object());
            return check_block_formulas(G, groupoid_jacobi(G, c.cfg), c.cfg);
        };
        t["properties"] = [](const CheckContext& c) {
            const GroupoidModel G = c.views.groupoid(c.object());
            return check_properties(G, groupoid_jacobi(G, c.cfg), c.cfg);
        };
        t["induced-base"] = [](const CheckContext& c) {
            const GroupoidModel G = c.views.groupoid(c.object());
            return induced_base_structure(G, groupoid_jacobi(G, c.cfg), c.cfg).report;
        };
        t["algebroid-isomorphism"] = [](const CheckContext& c) {
            const GroupoidModel G = c.views.groupoid(c.object());
            const GroupoidJacobi GJ = groupoid_jacobi(G, c.cfg);
            const InducedBase IB = induced_base_structure(G, GJ, c.cfg);
            return check_algebroid_isomorphism(G, GJ, IB.J, sections_param(c, G.base), c.cfg);
        };
        t["suspension"] = [](const CheckContext& c) { return suspend(c.views.groupoid(c.object()), c.cfg).report; };
        t["strip"] = strip_check;
        t["base-coincidence"] = [](const CheckContext& c) {
            return base_coincidence_check(c.views.groupoid(c.object()), c.cfg);
        };
        t["suspended"] = [](const CheckContext& c) { return check_suspended(c.views.suspended(c.object()), c.cfg); };
        t["anchor"] = anchor_check;
        t["cocycle-integral"] = cocycle_check;
        t["concatenation"] = concatenation_check;
        t["reparameterization"] = reparameterization_check;
        t["simpson-convergence"] = convergence_check;
        return t;
    }();
    return table;
}

void apply_config(SampleConfig& cfg, const Json& j, const std::string& ptr)
{
    if (const Json* v = optional_field(j, "samples")) {
        if (!v->is_number_integer() || v->get<int>() < 1) throw ScenarioError(child(ptr, "samples"), "expected a positive integer");
        cfg.samples = v->get<int>();
    }
    if (const Json* v = optional_field(j, "tol")) {
        if (!v->is_number() || v->get<double>() <= 0) throw ScenarioError(child(ptr, "tol"), "expected a positive number");
        cfg.tol = v->get<double>();
    }
    if (const Json* v = optional_field(j, "seed")) {
        if (!v->is_number_unsigned()) throw ScenarioError(child(ptr, "seed"), "expected a non-negative integer");
        cfg.seed = v->get<std::uint64_t>();
    }
}

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

// ---------------------------------------------------------------------------
// loading

Scenario Scenario::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError(path, "cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

Scenario Scenario::parse(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ScenarioError(line_col(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
    }
    if (!doc.is_object()) throw ScenarioError("", "a scenario is a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "charts" && it.key() != "structures" && it.key() != "checks" && it.key() != "defaults")
            throw ScenarioError("/" + it.key(), "unknown top-level field");

    Scenario sc;
    sc.entries_ = std::make_shared<std::map<std::string, Entry>>();
    if (const Json* d = optional_field(doc, "defaults")) apply_config(sc.defaults_, *d, "/defaults");

    if (const Json* charts = optional_field(doc, "charts")) {
        if (!charts->is_object()) throw ScenarioError("/charts", "expected an object of coordinate lists");
        for (auto it = charts->begin(); it != charts->end(); ++it) {
            const std::string ptr = child("/charts", it.key());
            if (!it.value().is_array()) throw ScenarioError(ptr, "expected an array of coordinate names");
            std::vector<std::string> coords;
            for (std::size_t i = 0; i < it.value().size(); ++i) {
                if (!it.value()[i].is_string()) throw ScenarioError(child(ptr, i), "coordinate names are strings");
                coords.push_back(it.value()[i].get<std::string>());
            }
            sc.charts_[it.key()] = guarded(ptr, [&] { return make_chart(it.key(), coords); });
            sc.chart_order_.push_back(it.key());
        }
    }

    auto chart_ref = [&sc](const Json& j, const std::string& key, const std::string& ptr) {
        const std::string name = string_field(j, key, ptr);
        auto it = sc.charts_.find(name);
        if (it == sc.charts_.end()) throw ScenarioError(child(ptr, key), "unknown chart '" + name + "'");
        return it->second;
    };

    const Json empty = Json::object();
    const Json& structures = optional_field(doc, "structures") ? doc["structures"] : empty;
    if (!structures.is_object()) throw ScenarioError("/structures", "expected an object of named structures");
    for (auto it = structures.begin(); it != structures.end(); ++it) sc.names_.push_back(it.key());
    auto structure_ref = [&](const Json& j, const std::string& key, const std::string& ptr) {
        const std::string name = string_field(j, key, ptr);
        if (!structures.contains(name)) throw ScenarioError(child(ptr, key), "unknown structure '" + name + "'");
        return name;
    };

    for (auto it = structures.begin(); it != structures.end(); ++it) {
        const std::string name = it.key();
        const std::string ptr = child("/structures", name);
        const Json& j = it.value();
        Entry e;
        e.ptr = ptr;
        e.def = j;
        e.kind = string_field(j, "kind", ptr);
        const auto kinds = known_kinds();
        if (std::find(kinds.begin(), kinds.end(), e.kind) == kinds.end())
            throw ScenarioError(child(ptr, "kind"), "unknown kind '" + e.kind + "'");

        if (e.kind == "jacobi") {
            const ChartPtr c = chart_ref(j, "chart", ptr);
            TwistedJacobi J = make_jacobi(c, mv_at(optional_field(j, "Lambda"), c, 2, child(ptr, "Lambda")),
                                          mv_at(optional_field(j, "E"), c, 1, child(ptr, "E")),
                                          form_at(optional_field(j, "omega"), c, 2, child(ptr, "omega")));
            e.build = [J] { return ScenarioObject(J); };
        } else if (e.kind == "contact") {
            const ChartPtr c = chart_ref(j, "chart", ptr);
            const Form theta = form_at(&field(j, "theta", ptr), c, 1, child(ptr, "theta"));
            const Form omega = form_at(optional_field(j, "omega"), c, 2, child(ptr, "omega"));
            e.build = [c, theta, omega] { return ScenarioObject(make_contact(c, theta, omega)); };
        } else if (e.kind == "homogeneous") {
            const ChartPtr c = chart_ref(j, "chart", ptr);
            HomTwistedPoisson H{c, mv_at(optional_field(j, "Lambda"), c, 2, child(ptr, "Lambda")),
                                form_at(optional_field(j, "omega"), c, 2, child(ptr, "omega")),
                                mv_at(&field(j, "Z", ptr), c, 1, child(ptr, "Z"))};
            e.build = [H] { return ScenarioObject(H); };
        } else if (e.kind == "multivector") {
            const ChartPtr c = chart_ref(j, "chart", ptr);
            const Json& deg = field(j, "degree", ptr);
            if (!deg.is_number_integer() || deg.get<int>() < 0) throw ScenarioError(child(ptr, "degree"), "expected a degree");
            MultiVector V = mv_at(optional_field(j, "components"), c, deg.get<int>(), child(ptr, "components"));
            e.build = [V] { return ScenarioObject(V); };
        } else if (e.kind == "groupoid" && optional_field(j, "pair_of")) {
            const std::string base = structure_ref(j, "pair_of", ptr);
            e.deps.push_back(base);
            std::optional<std::string> r;
            if (const Json* rj = optional_field(j, "r")) r = text_of(*rj, child(ptr, "r"));
            auto entries = sc.entries_;
            e.build = [entries, base, r, name]() -> ScenarioObject {
                const Entry& b = entries->at(base);
                if (!b.value) throw std::logic_error("dependency " + base + " not built");
                const auto* C = std::get_if<TwistedContact>(&*b.value);
                if (!C) throw std::invalid_argument("pair_of needs a contact structure; " + base + " is a " + kind_name(*b.value));
                GroupoidModel G = build_pair_groupoid(*C);
                if (r) G = with_r(G, parse_expr(*r, *G.total));
                G.name = name;
                return G;
            };
        } else if (e.kind == "groupoid") {
            GroupoidModel G;
            G.name = name;
            G.base = chart_ref(j, "base", ptr);
            G.total = chart_ref(j, "total", ptr);
            G.pairs = chart_ref(j, "pairs", ptr);
            if (optional_field(j, "triples")) G.triples = chart_ref(j, "triples", ptr);
            const std::string mptr = child(ptr, "maps");
            const Json& maps = field(j, "maps", ptr);
            auto req = [&](const std::string& key, const ChartPtr& s, const ChartPtr& t) {
                return map_at(field(maps, key, mptr), key, s, t, child(mptr, key));
            };
            auto opt = [&](const std::string& key, const ChartPtr& s, const ChartPtr& t) -> std::optional<SmoothMap> {
                if (!s || !optional_field(maps, key)) return std::nullopt;
                return map_at(maps.at(key), key, s, t, child(mptr, key));
            };
            G.alpha = req("alpha", G.total, G.base);
            G.beta = req("beta", G.total, G.base);
            G.iota = req("iota", G.total, G.total);
            G.eps = req("eps", G.base, G.total);
            G.m = req("m", G.pairs, G.total);
            G.pr1 = req("pr1", G.pairs, G.total);
            G.pr2 = req("pr2", G.pairs, G.total);
            G.unit_left = opt("unit_left", G.total, G.pairs);
            G.unit_right = opt("unit_right", G.total, G.pairs);
            G.inv_left = opt("inv_left", G.total, G.pairs);
            G.inv_right = opt("inv_right", G.total, G.pairs);
            G.t12 = opt("t12", G.triples, G.pairs);
            G.t23 = opt("t23", G.triples, G.pairs);
            G.assoc_left = opt("assoc_left", G.triples, G.pairs);
            G.assoc_right = opt("assoc_right", G.triples, G.pairs);
            G.r = expr_at(field(j, "r", ptr), *G.total, child(ptr, "r"));
            G.theta = form_at(&field(j, "theta", ptr), G.total, 1, child(ptr, "theta"));
            G.omega = form_at(optional_field(j, "omega"), G.total, 2, child(ptr, "omega"));
            G.omega0 = form_at(optional_field(j, "omega0"), G.base, 2, child(ptr, "omega0"));
            if (const Json* b = optional_field(j, "blocks")) {
                const std::string bptr = child(ptr, "blocks");
                G.blocks = PairBlocks{field(*b, "beta_offset", bptr).get<int>(), field(*b, "alpha_offset", bptr).get<int>(),
                                      field(*b, "r_coord", bptr).get<int>()};
            }
            std::optional<std::string> base_contact;
            if (optional_field(j, "base_contact")) {
                base_contact = structure_ref(j, "base_contact", ptr);
                e.deps.push_back(*base_contact);
            }
            auto entries = sc.entries_;
            e.build = [entries, G, base_contact]() mutable -> ScenarioObject {
                if (base_contact) {
                    const Entry& b = entries->at(*base_contact);
                    const auto* C = std::get_if<TwistedContact>(&*b.value);
                    if (!C) throw std::invalid_argument("base_contact must name a contact structure");
                    if (!(*C->chart == *G.base)) throw std::invalid_argument("base_contact lives on another chart");
                    G.base_contact = *C;
                }
                return G;
            };
        } else if (e.kind == "suspended-groupoid") {
            SuspendedModel S;
            S.base = chart_ref(j, "base", ptr);
            S.total = chart_ref(j, "total", ptr);
            S.pairs = chart_ref(j, "pairs", ptr);
            const std::string mptr = child(ptr, "maps");
            const Json& maps = field(j, "maps", ptr);
            auto req = [&](const std::string& key, const ChartPtr& s, const ChartPtr& t) {
                return map_at(field(maps, key, mptr), key + "~", s, t, child(mptr, key));
            };
            S.alpha = req("alpha", S.total, S.base);
            S.beta = req("beta", S.total, S.base);
            S.iota = req("iota", S.total, S.total);
            S.eps = req("eps", S.base, S.total);
            S.m = req("m", S.pairs, S.total);
            S.pr1 = req("pr1", S.pairs, S.total);
            S.pr2 = req("pr2", S.pairs, S.total);
            S.Omega = form_at(&field(j, "Omega", ptr), S.total, 2, child(ptr, "Omega"));
            S.omega0 = form_at(optional_field(j, "omega0"), S.base, 2, child(ptr, "omega0"));
            S.Z = MultiVector::basis(S.total, {S.total->dim() - 1});
            S.Z0 = MultiVector::basis(S.base, {S.base->dim() - 1});
            e.build = [S] { return ScenarioObject(S); };
        } else {   // apath
            const std::string on = structure_ref(j, "structure", ptr);
            e.deps.push_back(on);
            const double box = optional_field(j, "box") ? j.at("box").get<double>() : 1.0;
            auto entries = sc.entries_;
            if (optional_field(j, "samples")) {
                const std::string sptr = child(ptr, "samples");
                const Json& rows = j.at("samples");
                if (!rows.is_array() || rows.size() < 2) throw ScenarioError(sptr, "expected an array of samples");
                std::vector<Point> gamma;
                std::vector<Fiber> fiber;
                const double N = static_cast<double>(rows.size() - 1);
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const Json& row = rows[i];
                    if (!row.is_array() || row.size() != 4) throw ScenarioError(child(sptr, i), "expected [t, gamma, zeta, f]");
                    if (std::abs(row[0].get<double>() - static_cast<double>(i) / N) > 1e-12)
                        throw ScenarioError(child(sptr, i), "sample times must be i/N");
                    gamma.push_back(row[1].get<std::vector<double>>());
                    fiber.push_back(Fiber{row[2].get<std::vector<double>>(), row[3].get<double>()});
                }
                e.build = [entries, on, gamma, fiber, box]() -> ScenarioObject {
                    const Entry& b = entries->at(on);
                    TwistedJacobi J;
                    if (auto* c = std::get_if<TwistedContact>(&*b.value)) J = jacobi_from_contact(*c).J;
                    else if (auto* jj = std::get_if<TwistedJacobi>(&*b.value)) J = *jj;
                    else throw std::invalid_argument("A-paths need a Jacobi or contact structure");
                    return make_path(J, gamma, fiber, box);
                };
            } else {
                const int N = field(j, "N", ptr).get<int>();
                std::vector<std::string> gamma;
                for (const auto& g : field(j, "gamma", ptr)) gamma.push_back(text_of(g, child(ptr, "gamma")));
                const KeyedComponents zeta = optional_field(j, "zeta") ? keyed(j.at("zeta"), child(ptr, "zeta")) : KeyedComponents{};
                const std::string f = optional_field(j, "f") ? text_of(j.at("f"), child(ptr, "f")) : "0";
                const ChartPtr time = make_chart("time", {"t"});
                for (const auto& g : gamma) (void)expr_at(g, *time, child(ptr, "gamma"));
                for (const auto& [k, v] : zeta) (void)expr_at(v, *time, child(child(ptr, "zeta"), k));
                (void)expr_at(f, *time, child(ptr, "f"));
                e.build = [entries, on, N, gamma, zeta, f, box]() -> ScenarioObject {
                    const Entry& b = entries->at(on);
                    TwistedJacobi J;
                    if (auto* c = std::get_if<TwistedContact>(&*b.value)) J = jacobi_from_contact(*c).J;
                    else if (auto* jj = std::get_if<TwistedJacobi>(&*b.value)) J = *jj;
                    else throw std::invalid_argument("A-paths need a Jacobi or contact structure");
                    return sample_path(J, parse_path(J, gamma, zeta, f), N, box);
                };
            }
        }
        sc.entries_->emplace(name, std::move(e));
    }

    const Json& checks = optional_field(doc, "checks") ? doc["checks"] : Json::array();
    if (!checks.is_array()) throw ScenarioError("/checks", "expected an array of checks");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string ptr = child("/checks", i);
        const Json& c = checks[i];
        const std::string kind = string_field(c, "check", ptr);
        if (!registry().count(kind)) throw ScenarioError(child(ptr, "check"), "unknown check '" + kind + "'");
        if (kind == "concatenation") {
            const Json& objs = field(c, "objects", ptr);
            if (!objs.is_array() || objs.size() != 2) throw ScenarioError(child(ptr, "objects"), "expected two paths");
            for (std::size_t k = 0; k < 2; ++k) {
                if (!objs[k].is_string() || !structures.contains(objs[k].get<std::string>()))
                    throw ScenarioError(child(child(ptr, "objects"), k), "unknown structure");
            }
        } else {
            (void)structure_ref(c, "object", ptr);
        }
        for (const char* ref : {"E", "Lambda"})
            if (optional_field(c, ref)) (void)structure_ref(c, ref, ptr);
        SampleConfig probe;
        apply_config(probe, c, ptr);
        sc.checks_.emplace_back(ptr, c);
    }
    return sc;
}

ChartPtr Scenario::chart(const std::string& name) const
{
    auto it = charts_.find(name);
    if (it == charts_.end()) throw std::out_of_range("unknown chart '" + name + "'");
    return it->second;
}

const ScenarioObject& Scenario::object(const std::string& name) const
{
    auto it = entries_->find(name);
    if (it == entries_->end()) throw std::out_of_range("unknown structure '" + name + "'");
    const Entry& e = it->second;
    if (e.value) return *e.value;
    if (!e.error.empty()) throw std::runtime_error(e.error);
    if (e.building) throw std::runtime_error("structure '" + name + "' refers to itself");
    e.building = true;
    try {
        for (const auto& d : e.deps) (void)object(d);
        e.value = e.build();
    } catch (const std::exception& ex) {
        e.building = false;
        e.error = "cannot build '" + name + "': " + ex.what();
        throw std::runtime_error(e.error);
    }
    e.building = false;
    return *e.value;
}

// ---------------------------------------------------------------------------
// running

std::vector<CheckOutcome> Scenario::run(const RunOptions& opts) const
{
    const Views views(*this);
    std::vector<CheckOutcome> out;
    for (const auto& [ptr, def] : checks_) {
        CheckOutcome o;
        o.kind = def.at("check").get<std::string>();
        if (const Json* n = optional_field(def, "name"); n && n->is_string()) o.name = n->get<std::string>();
        else if (def.contains("object")) o.name = o.kind + " " + def.at("object").get<std::string>();
        else o.name = o.kind + " " + def.at("objects").at(0).get<std::string>() + " " + def.at("objects").at(1).get<std::string>();

        SampleConfig cfg = defaults_;
        if (opts.samples) cfg.samples = *opts.samples;
        if (opts.tol) cfg.tol = *opts.tol;
        if (opts.seed) cfg.seed = *opts.seed;
        apply_config(cfg, def, ptr);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            o.report = registry().at(o.kind)(CheckContext{views, def, cfg});
        } catch (const std::exception& e) {
            o.report = Report(o.kind);
            CheckResult r;
            r.name = "preconditions";
            r.verdict = Verdict::Error;
            r.witness = e.what();
            o.report.add(r);
        }
        o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<std::string> check_kinds()
{
    std::vector<std::string> out;
    for (const auto& [k, fn] : registry()) out.push_back(k);
    return out;
}

std::string to_jsonl(const std::vector<CheckOutcome>& outcomes, bool deterministic)
{
    std::string out;
    for (const auto& o : outcomes) {
        Json j;
        j["name"] = o.name;
        j["verdict"] = to_string(o.verdict());
        const double res = o.report.max_residual();
        j["max_residual"] = std::isfinite(res) ? Json(res) : Json(nullptr);
        j["assumptions"] = o.report.assumptions();
        j["ms"] = deterministic ? 0.0 : std::round(o.ms * 1000.0) / 1000.0;
        for (const auto& c : o.report.checks())
            if (!passed(c.verdict)) {
                j["witness"] = c.name + ": " + c.witness;
                break;
            }
        out += j.dump() + "\n";
    }
    return out;
}

std::string format_outcomes(const std::vector<CheckOutcome>& outcomes, bool deterministic)
{
    std::ostringstream os;
    int failed = 0;
    for (const auto& o : outcomes) {
        os << (o.passed() ? "PASS  " : "FAIL  ") << o.name << "  [" << to_string(o.verdict()) << "]";
        os << std::setprecision(3) << "  max residual " << o.report.max_residual();
        if (!deterministic) os << std::fixed << std::setprecision(1) << "  " << o.ms << " ms" << std::defaultfloat;
        os << "\n";
        for (const auto& c : o.report.checks()) {
            if (passed(c.verdict)) continue;
            os << "      " << to_string(c.verdict) << " " << c.name;
            if (!c.witness.empty()) os << ": " << c.witness;
            os << "\n";
        }
        for (const auto& a : o.report.assumptions()) os << "      assumes " << a << "\n";
        for (const auto& n : o.report.notes()) os << "      note: " << n << "\n";
        if (!o.passed()) ++failed;
    }
    os << outcomes.size() - failed << "/" << outcomes.size() << " checks passed\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// derive

std::vector<std::string> constructions()
{
    return {"reeb", "contact-bivector", "jacobi", "poissonize", "pair-groupoid", "suspend"};
}

Json Scenario::derive(const std::string& object_name, const std::string& construction) const
{
    const auto known = constructions();
    if (std::find(known.begin(), known.end(), construction) == known.end())
        throw std::invalid_argument("unknown construction '" + construction + "'");
    const Views views(*this);
    const ScenarioObject& src = object(object_name);

    Json doc;
    Json charts = Json::object();
    for (const auto& name : chart_order_) {
        Json coords = Json::array();
        for (const auto& c : charts_.at(name)->coords()) coords.push_back(c);
        charts[name] = coords;
    }
    // a chart under a fresh name unless an equal one already exists
    auto add_chart = [&charts](const ChartPtr& c) {
        for (auto it = charts.begin(); it != charts.end(); ++it)
            if (it.key() == c->name() && it.value().get<std::vector<std::string>>() == c->coords()) return c->name();
        std::string name = c->name();
        while (charts.contains(name)) name += "'";
        charts[name] = c->coords();
        return name;
    };

    // the source and what it depends on, verbatim
    Json structures = Json::object();
    std::vector<std::string> stack{object_name};
    std::set<std::string> seen;
    std::vector<std::string> order;
    while (!stack.empty()) {
        const std::string n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        order.push_back(n);
        for (const auto& d : entries_->at(n).deps) stack.push_back(d);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) structures[*it] = entries_->at(*it).def;

    const std::string out_name = object_name + "." + construction;
    Json derived = Json::object();
    Json checks = Json::array();
    auto check = [&checks](const std::string& kind, const std::string& obj, Json extra = Json::object()) {
        Json c = Json::object();
        c["check"] = kind;
        c["object"] = obj;
        for (auto it = extra.begin(); it != extra.end(); ++it) c[it.key()] = it.value();
        checks.push_back(c);
    };

    if (construction == "reeb" || construction == "contact-bivector") {
        const TwistedContact C = views.contact(object_name);
        const ContactSolution sol = solve_contact(C);
        const bool is_reeb = construction == "reeb";
        derived["kind"] = "multivector";
        derived["chart"] = add_chart(C.chart);
        derived["degree"] = is_reeb ? 1 : 2;
        derived["components"] = tensor_json(is_reeb ? sol.E : sol.Lambda);
        check("contact-identities", object_name, Json{{is_reeb ? "E" : "Lambda", out_name}});
    } else if (construction == "jacobi") {
        const TwistedJacobi J = views.jacobi(object_name);
        derived["kind"] = "jacobi";
        derived["chart"] = add_chart(J.chart);
        derived["Lambda"] = tensor_json(J.Lambda);
        derived["E"] = tensor_json(J.E);
        derived["omega"] = tensor_json(J.omega);
        check("twisted-jacobi", out_name);
        check("algebroid", out_name);
    } else if (construction == "poissonize") {
        const HomTwistedPoisson H = views.homogeneous(object_name);
        derived["kind"] = "homogeneous";
        derived["chart"] = add_chart(H.chart);
        derived["Lambda"] = tensor_json(H.Lambda);
        derived["omega"] = tensor_json(H.omega);
        derived["Z"] = tensor_json(H.Z);
        check("homogeneous", out_name);
    } else if (construction == "pair-groupoid") {
        const GroupoidModel G = views.groupoid(object_name);
        derived["kind"] = "groupoid";
        derived["base"] = add_chart(G.base);
        derived["total"] = add_chart(G.total);
        derived["pairs"] = add_chart(G.pairs);
        if (G.triples) derived["triples"] = add_chart(G.triples);
        Json maps = Json::object();
        maps["alpha"] = map_json(G.alpha);
        maps["beta"] = map_json(G.beta);
        maps["iota"] = map_json(G.iota);
        maps["eps"] = map_json(G.eps);
        maps["m"] = map_json(G.m);
        maps["pr1"] = map_json(G.pr1);
        maps["pr2"] = map_json(G.pr2);
        for (const auto* opt : {&G.unit_left, &G.unit_right, &G.inv_left, &G.inv_right, &G.t12, &G.t23,
                                &G.assoc_left, &G.assoc_right})
            if (*opt) maps[(*opt)->name] = map_json(**opt);
        derived["maps"] = maps;
        derived["r"] = G.r.to_string(*G.total);
        derived["theta"] = tensor_json(G.theta);
        derived["omega"] = tensor_json(G.omega);
        derived["omega0"] = tensor_json(G.omega0);
        if (G.blocks)
            derived["blocks"] = Json{{"beta_offset", G.blocks->beta_offset}, {"alpha_offset", G.blocks->alpha_offset},
                                     {"r_coord", G.blocks->r_coord}};
        if (G.base_contact && std::holds_alternative<TwistedContact>(src)) derived["base_contact"] = object_name;
        else if (G.base_contact) {
            for (const auto& n : order)
                if (entries_->at(n).kind == "contact") derived["base_contact"] = n;
        }
        check("groupoid-axioms", out_name);
        check("multiplicativity", out_name);
        check("volume", out_name);
    } else {   // suspend
        const SuspendedModel S = views.suspended(object_name);
        derived["kind"] = "suspended-groupoid";
        derived["base"] = add_chart(S.base);
        derived["total"] = add_chart(S.total);
        derived["pairs"] = add_chart(S.pairs);
        derived["maps"] = Json{{"alpha", map_json(S.alpha)}, {"beta", map_json(S.beta)}, {"iota", map_json(S.iota)},
                               {"eps", map_json(S.eps)},     {"m", map_json(S.m)},       {"pr1", map_json(S.pr1)},
                               {"pr2", map_json(S.pr2)}};
        derived["Omega"] = tensor_json(S.Omega);
        derived["omega0"] = tensor_json(S.omega0);
        check("suspended", out_name);
    }
    structures[out_name] = derived;

    doc["charts"] = charts;
    doc["structures"] = structures;
    doc["checks"] = checks;
    return doc;
}

}  // namespace twistjac
