#include "roughhodge/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::ParseError, "at " + path + ": " + what);
}

/// Object view that records which keys were read and rejects the rest.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            fail(path_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    std::string path(const std::string& key) const { return path_ + "." + key; }

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key)
    {
        const json* v = get(key);
        if (!v)
            fail(path_, "missing required key '" + key + "'");
        return *v;
    }

    void finish() const
    {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key()))
                fail(path(item.key()), "unknown key");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        fail(path, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        fail(path, "expected a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        fail(path, "expected true or false");
    return v.get<bool>();
}

long long as_integer(const json& v, const std::string& path, long long lo)
{
    if (!v.is_number_integer())
        fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo)
        fail(path, "must be >= " + std::to_string(lo));
    return x;
}

std::uint64_t as_seed(const json& v, const std::string& path)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(path, "seed must be a non-negative integer");
    return v.get<std::uint64_t>();
}

Scalar as_scalar(const json& v, const std::string& path)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(path, "expected a number or a [re, im] pair");
}

const json& as_array(const json& v, const std::string& path)
{
    if (!v.is_array())
        fail(path, "expected an array");
    return v;
}

std::string at(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

std::vector<Scalar> scalar_list(const json& v, const std::string& path)
{
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < as_array(v, path).size(); ++i)
        out.push_back(as_scalar(v[i], at(path, i)));
    return out;
}

std::vector<std::vector<double>> number_rows(const json& v, const std::string& path)
{
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < as_array(v, path).size(); ++i) {
        const std::string p = at(path, i);
        std::vector<double> row;
        for (std::size_t j = 0; j < as_array(v[i], p).size(); ++j)
            row.push_back(as_number(v[i][j], at(p, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

GridSpec parse_grid(const json& v, const std::string& path)
{
    Fields f(v, path);
    GridSpec g;
    const json& sizes = f.require("sizes");
    for (std::size_t i = 0; i < as_array(sizes, f.path("sizes")).size(); ++i)
        g.sizes.push_back(static_cast<Index>(as_integer(sizes[i], at(f.path("sizes"), i), 1)));
    if (g.sizes.empty())
        fail(f.path("sizes"), "a grid needs at least one axis");
    g.periodic.assign(g.sizes.size(), false);
    if (const json* p = f.get("periodic")) {
        if (p->is_boolean()) {
            g.periodic.assign(g.sizes.size(), p->get<bool>());
        } else {
            if (as_array(*p, f.path("periodic")).size() != g.sizes.size())
                fail(f.path("periodic"), "needs one flag per axis");
            for (std::size_t i = 0; i < p->size(); ++i)
                g.periodic[i] = as_bool((*p)[i], at(f.path("periodic"), i));
        }
    }
    if (const json* l = f.get("lengths")) {
        if (as_array(*l, f.path("lengths")).size() != g.sizes.size())
            fail(f.path("lengths"), "needs one length per axis");
        for (std::size_t i = 0; i < l->size(); ++i) {
            const double x = as_number((*l)[i], at(f.path("lengths"), i));
            if (!(x > 0))
                fail(at(f.path("lengths"), i), "lengths must be positive");
            g.lengths.push_back(x);
        }
    }
    f.finish();
    return g;
}

KoszulSpec parse_koszul(const json& v, const std::string& path)
{
    Fields f(v, path);
    KoszulSpec k;
    k.n = static_cast<int>(as_integer(f.require("n"), f.path("n"), 0));
    if (k.n > 12)
        fail(f.path("n"), "exterior algebra rank above 12 is not supported");
    const json& omega = f.require("omega");
    for (std::size_t i = 0; i < as_array(omega, f.path("omega")).size(); ++i) {
        const std::string p = at(f.path("omega"), i);
        Fields term(omega[i], p);
        std::vector<unsigned> idx;
        const json& indices = term.require("indices");
        for (std::size_t j = 0; j < as_array(indices, term.path("indices")).size(); ++j) {
            const long long x = as_integer(indices[j], at(term.path("indices"), j), 0);
            if (x >= k.n)
                fail(at(term.path("indices"), j), "covector index out of range");
            idx.push_back(static_cast<unsigned>(x));
        }
        const Scalar c = as_scalar(term.require("coeff"), term.path("coeff"));
        term.finish();
        k.omega.emplace_back(std::move(idx), c);
    }
    f.finish();
    return k;
}

ComplexSpec parse_complex(const json& v, const std::string& path)
{
    Fields f(v, path);
    ComplexSpec c;
    int sources = 0;
    if (const json* x = f.get("fixture")) {
        c.fixture = as_string(*x, f.path("fixture"));
        ++sources;
    }
    if (const json* x = f.get("file")) {
        c.file = as_string(*x, f.path("file"));
        ++sources;
    }
    if (const json* x = f.get("grid")) {
        c.grid = parse_grid(*x, f.path("grid"));
        ++sources;
    }
    if (const json* x = f.get("koszul")) {
        c.koszul = parse_koszul(*x, f.path("koszul"));
        ++sources;
    }
    if (sources != 1)
        fail(path, "exactly one of fixture, file, grid, koszul is required");
    if (const json* x = f.get("boundary")) {
        c.boundary = as_string(*x, f.path("boundary"));
        if (c.boundary != "absolute" && c.boundary != "relative")
            fail(f.path("boundary"), "boundary must be 'absolute' or 'relative'");
    }
    if (const json* x = f.get("local_system")) {
        Fields ls(*x, f.path("local_system"));
        LocalSystemSpec spec;
        if (const json* s = ls.get("scalar"))
            spec.scalar = scalar_list(*s, ls.path("scalar"));
        if (const json* h = ls.get("holonomy"))
            spec.holonomy = as_scalar(*h, ls.path("holonomy"));
        if (spec.scalar.empty() == !spec.holonomy.has_value())
            fail(f.path("local_system"), "give exactly one of 'scalar' or 'holonomy'");
        ls.finish();
        c.local_system = std::move(spec);
    }
    if (const json* x = f.get("magnet")) {
        Fields m(*x, f.path("magnet"));
        c.cup_magnet = scalar_list(m.require("cup"), m.path("cup"));
        m.finish();
    }
    if (c.koszul && (c.boundary != "absolute" || c.local_system || c.cup_magnet))
        fail(path, "koszul models take no boundary, local system or magnet");
    f.finish();
    return c;
}

MetricSpec parse_metric(const json& v, const std::string& path)
{
    Fields f(v, path);
    MetricSpec m;
    m.model = as_string(f.require("model"), f.path("model"));
    static const std::vector<std::string> models = {"identity", "log_gaussian", "weierstrass",
                                                    "explicit", "block_spd",    "weights"};
    if (std::find(models.begin(), models.end(), m.model) == models.end())
        fail(f.path("model"), "unknown metric model '" + m.model + "'");
    if (const json* x = f.get("seed")) {
        m.seed = as_seed(*x, f.path("seed"));
        m.has_seed = true;
    }
    if (const json* x = f.get("clamp")) {
        m.clamp = as_number(*x, f.path("clamp"));
        if (!(m.clamp >= 1) || !std::isfinite(m.clamp))
            fail(f.path("clamp"), "clamp must be finite and >= 1");
    }
    if (const json* x = f.get("terms"))
        m.terms = static_cast<int>(as_integer(*x, f.path("terms"), 1));
    if (const json* x = f.get("matrix"))
        m.matrix = number_rows(*x, f.path("matrix"));
    if (const json* x = f.get("weights"))
        m.weights = number_rows(*x, f.path("weights"));
    if (m.model == "explicit" && m.matrix.empty())
        fail(path, "explicit metrics need 'matrix'");
    if (m.model == "weights" && m.weights.empty())
        fail(path, "weights metrics need 'weights' (one diagonal per degree)");
    f.finish();
    return m;
}

TaskSpec parse_task(const json& v, const std::string& path)
{
    TaskSpec t;
    if (v.is_string()) {
        t.type = v.get<std::string>();
    } else {
        Fields f(v, path);
        t.type = as_string(f.require("type"), f.path("type"));
        if (const json* x = f.get("power"))
            t.power = static_cast<int>(as_integer(*x, f.path("power"), 1));
        if (const json* x = f.get("powers")) {
            t.powers.clear();
            for (std::size_t i = 0; i < as_array(*x, f.path("powers")).size(); ++i)
                t.powers.push_back(static_cast<int>(as_integer((*x)[i], at(f.path("powers"), i), 1)));
        }
        f.finish();
    }
    const auto& names = task_names();
    if (std::find(names.begin(), names.end(), t.type) == names.end())
        fail(path, "unknown task '" + t.type + "'");
    return t;
}

RefineConfig parse_refine(const json& v, const std::string& path)
{
    Fields f(v, path);
    RefineConfig r;
    try {
        if (const json* x = f.get("model"))
            r.model = parse_refine_model(as_string(*x, f.path("model")));
        if (const json* x = f.get("form"))
            r.form = parse_refine_form(as_string(*x, f.path("form")));
    } catch (const Error& e) {
        fail(path, e.what());
    }
    if (const json* x = f.get("base"))
        r.base = static_cast<Index>(as_integer(*x, f.path("base"), 1));
    if (const json* x = f.get("levels"))
        r.levels = static_cast<int>(as_integer(*x, f.path("levels"), 1));
    if (const json* x = f.get("terms"))
        r.weierstrass_terms = static_cast<int>(as_integer(*x, f.path("terms"), 1));
    if (r.levels > 8)
        fail(f.path("levels"), "at most 8 levels");
    f.finish();
    return r;
}

double* tolerance_slot(Tolerances& tol, const std::string& key)
{
    if (key == "rank_gap") return &tol.rank_gap;
    if (key == "residual") return &tol.residual;
    if (key == "isomorphism") return &tol.isomorphism;
    if (key == "self_adjoint") return &tol.self_adjoint;
    if (key == "nilpotency") return &tol.nilpotency;
    if (key == "split") return &tol.split;
    if (key == "flatness") return &tol.flatness;
    return nullptr;
}

Tolerances parse_tolerances(const json& v, const std::string& path)
{
    Tolerances t;
    Fields f(v, path);
    for (const auto& item : v.items()) {
        double* slot = tolerance_slot(t, item.key());
        if (!slot)
            fail(f.path(item.key()), "unknown tolerance");
        const double x = as_number(*f.get(item.key()), f.path(item.key()));
        if (!(x > 0))
            fail(f.path(item.key()), "tolerances must be positive");
        *slot = x;
    }
    f.finish();
    return t;
}

}  // namespace

const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names = {"betti",      "decompose",        "isomorphism",
                                                   "graded_isomorphism", "power_check", "refine_divergence"};
    return names;
}

void set_tolerance(Tolerances& tol, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorKind::ParseError, "tolerance override must be KEY=VAL: '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error(ErrorKind::ParseError, "tolerance '" + key + "' needs a number, got '" + text + "'");
    if (!(value > 0))
        throw Error(ErrorKind::ParseError, "tolerance '" + key + "' must be positive");
    double* slot = tolerance_slot(tol, key);
    if (!slot)
        throw Error(ErrorKind::ParseError, "unknown tolerance '" + key + "'");
    *slot = value;
}

json to_json(const Tolerances& tol)
{
    return {{"flatness", tol.flatness},       {"isomorphism", tol.isomorphism}, {"nilpotency", tol.nilpotency},
            {"rank_gap", tol.rank_gap},       {"residual", tol.residual},       {"self_adjoint", tol.self_adjoint},
            {"split", tol.split}};
}

Scenario parse_scenario(const json& doc)
{
    Fields f(doc, "$");
    Scenario s;
    s.source = doc;
    if (const json* x = f.get("name"))
        s.name = as_string(*x, f.path("name"));
    if (const json* x = f.get("$schema"))
        as_string(*x, f.path("$schema"));
    if (const json* x = f.get("description"))
        as_string(*x, f.path("description"));
    s.complex = parse_complex(f.require("complex"), f.path("complex"));
    if (const json* x = f.get("metrics")) {
        for (std::size_t i = 0; i < as_array(*x, f.path("metrics")).size(); ++i)
            s.metrics.push_back(parse_metric((*x)[i], at(f.path("metrics"), i)));
    }
    if (s.metrics.size() > 2)
        fail(f.path("metrics"), "at most two metric specs");
    if (s.metrics.empty())
        s.metrics.push_back(MetricSpec{});
    const json& tasks = f.require("tasks");
    for (std::size_t i = 0; i < as_array(tasks, f.path("tasks")).size(); ++i)
        s.tasks.push_back(parse_task(tasks[i], at(f.path("tasks"), i)));
    if (s.tasks.empty())
        fail(f.path("tasks"), "at least one task is required");
    if (const json* x = f.get("tolerances"))
        s.tolerances = parse_tolerances(*x, f.path("tolerances"));
    if (const json* x = f.get("refine"))
        s.refine = parse_refine(*x, f.path("refine"));
    if (const json* x = f.get("output")) {
        Fields o(*x, f.path("output"));
        if (const json* d = o.get("dir"))
            s.output.dir = as_string(*d, o.path("dir"));
        if (const json* d = o.get("stem"))
            s.output.stem = as_string(*d, o.path("stem"));
        if (const json* d = o.get("csv"))
            s.output.csv = as_bool(*d, o.path("csv"));
        if (const json* d = o.get("svg"))
            s.output.svg = as_bool(*d, o.path("svg"));
        o.finish();
    }
    if (const json* x = f.get("expect_error"))
        s.expect_error = as_string(*x, f.path("expect_error"));
    f.finish();

    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        const std::string& type = s.tasks[i].type;
        if ((type == "isomorphism" || type == "graded_isomorphism") && s.metrics.size() != 2)
            fail(at("$.tasks", i), "isomorphism tasks require two metric specs");
        if (type == "refine_divergence" && !s.refine)
            s.refine = RefineConfig{};
    }
    if (s.output.stem.empty())
        s.output.stem = s.name;
    return s;
}

Scenario parse_scenario_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open scenario " + path);
    std::ostringstream text;
    text << in.rdbuf();
    Scenario s = parse_scenario_text(text.str());
    s.base_dir = std::filesystem::path(path).parent_path().string();
    return s;
}

MetricSpec parse_metric_shorthand(const std::string& text)
{
    MetricSpec m;
    if (text == "identity")
        return m;
    // random:<seed>:<C>
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (text.rfind("random:", 0) != 0 || second == std::string::npos)
        throw Error(ErrorKind::ParseError, "metric must be 'identity' or 'random:<seed>:<C>', got '" + text + "'");
    const std::string seed = text.substr(first + 1, second - first - 1);
    const std::string clamp = text.substr(second + 1);
    std::uint64_t sv = 0;
    double cv = 0;
    const auto r1 = std::from_chars(seed.data(), seed.data() + seed.size(), sv);
    const auto r2 = std::from_chars(clamp.data(), clamp.data() + clamp.size(), cv);
    if (r1.ec != std::errc() || r1.ptr != seed.data() + seed.size() || r2.ec != std::errc() ||
        r2.ptr != clamp.data() + clamp.size() || !(cv >= 1))
        throw Error(ErrorKind::ParseError, "malformed random metric '" + text + "'");
    m.model = "log_gaussian";
    m.seed = sv;
    m.has_seed = true;
    m.clamp = cv;
    return m;
}

}  // namespace rhodge
