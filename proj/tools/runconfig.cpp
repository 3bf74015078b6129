#include "runconfig.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace halfline::tools {
namespace {

[[noreturn]] void fail_at(const TomlTable& table, int line, const std::string& msg) {
    throw ConfigError(table.origin + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_cfg(const TomlTable& table, const std::string& msg) {
    throw ConfigError(table.origin + ": " + msg);
}

const char* kind_label(TomlValue::Kind k) {
    switch (k) {
        case TomlValue::Kind::String: return "string";
        case TomlValue::Kind::Bool: return "boolean";
        case TomlValue::Kind::Integer: return "integer";
        case TomlValue::Kind::Float: return "float";
        case TomlValue::Kind::Array: return "array";
    }
    return "?";
}

// Typed access to one section with an upfront key allowlist.
class Section {
  public:
    Section(const TomlTable& table, std::string name, std::set<std::string> allowed)
        : table_(table), name_(std::move(name)) {
        auto it = table.sections.find(name_);
        if (it == table.sections.end()) return;
        kv_ = &it->second;
        for (const auto& [key, value] : *kv_) {
            if (allowed.find(key) == allowed.end()) {
                fail_at(table_, value.line,
                        "unknown key '" + key + "' in " + label());
            }
        }
    }

    bool present() const { return kv_ != nullptr; }
    bool has(const std::string& key) const { return kv_ && kv_->count(key) > 0; }

    const TomlValue* raw(const std::string& key) const {
        if (!kv_) return nullptr;
        auto it = kv_->find(key);
        return it == kv_->end() ? nullptr : &it->second;
    }

    std::optional<double> number(const std::string& key) const {
        const TomlValue* v = raw(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) wrong_type(key, *v, "a number");
        return v->number;
    }

    std::optional<long long> integer(const std::string& key) const {
        const TomlValue* v = raw(key);
        if (!v) return std::nullopt;
        if (v->kind != TomlValue::Kind::Integer) wrong_type(key, *v, "an integer");
        return v->integer;
    }

    std::optional<std::string> str(const std::string& key) const {
        const TomlValue* v = raw(key);
        if (!v) return std::nullopt;
        if (v->kind != TomlValue::Kind::String) wrong_type(key, *v, "a string");
        return v->str;
    }

    std::optional<std::vector<double>> numbers(const std::string& key) const {
        const TomlValue* v = raw(key);
        if (!v) return std::nullopt;
        if (v->kind != TomlValue::Kind::Array) wrong_type(key, *v, "an array of numbers");
        std::vector<double> out;
        out.reserve(v->items.size());
        for (const auto& e : v->items) {
            if (!e.is_number()) wrong_type(key, *v, "an array of numbers");
            out.push_back(e.number);
        }
        return out;
    }

    std::optional<Complex> complex2(const std::string& key) const {
        auto arr = numbers(key);
        if (!arr) return std::nullopt;
        if (arr->size() != 2) {
            fail_at(table_, raw(key)->line,
                    "key '" + key + "' in " + label() + " must be [re, im]");
        }
        return Complex((*arr)[0], (*arr)[1]);
    }

    std::optional<std::array<double, 2>> pair(const std::string& key) const {
        auto arr = numbers(key);
        if (!arr) return std::nullopt;
        if (arr->size() != 2) {
            fail_at(table_, raw(key)->line,
                    "key '" + key + "' in " + label() + " must have two entries");
        }
        return std::array<double, 2>{(*arr)[0], (*arr)[1]};
    }

    [[noreturn]] void missing(const std::string& key, const std::string& why) const {
        fail_cfg(table_, "missing key '" + key + "' in " + label() + " (" + why + ")");
    }

    std::string label() const {
        return name_.empty() ? std::string("the top level") : "[" + name_ + "]";
    }

  private:
    [[noreturn]] void wrong_type(const std::string& key, const TomlValue& v,
                                 const std::string& want) const {
        fail_at(table_, v.line,
                "key '" + key + "' in " + label() + " must be " + want + ", got " +
                    kind_label(v.kind));
    }

    const TomlTable& table_;
    std::string name_;
    const std::map<std::string, TomlValue>* kv_ = nullptr;
};

Json toml_to_json(const TomlValue& v) {
    switch (v.kind) {
        case TomlValue::Kind::String: return v.str;
        case TomlValue::Kind::Bool: return v.boolean;
        case TomlValue::Kind::Integer: return v.integer;
        case TomlValue::Kind::Float: return v.number;
        case TomlValue::Kind::Array: {
            Json arr = Json::array();
            for (const auto& e : v.items) arr.push_back(toml_to_json(e));
            return arr;
        }
    }
    return nullptr;
}

Json build_echo(const TomlTable& table) {
    Json echo = Json::object();
    for (const auto& [section, kv] : table.sections) {
        if (section.empty()) {
            for (const auto& [key, value] : kv) echo[key] = toml_to_json(value);
            continue;
        }
        if (kv.empty()) continue;
        Json obj = Json::object();
        for (const auto& [key, value] : kv) obj[key] = toml_to_json(value);
        echo[section] = obj;
    }
    return echo;
}

// CSV of "x,re,im" rows; a non-numeric first line is taken as a header.
void read_samples_csv(const std::string& path, std::vector<double>& xs,
                      std::vector<Complex>& vs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open data file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 3> cols{};
        std::size_t start = 0;
        bool ok = true;
        for (int c = 0; c < 3; ++c) {
            std::size_t end = c < 2 ? line.find(',', start) : line.size();
            if (end == std::string::npos) {
                ok = false;
                break;
            }
            const char* b = line.data() + start;
            const char* e = line.data() + end;
            while (b < e && (*b == ' ' || *b == '\t')) ++b;
            if (b < e && *b == '+') ++b;
            auto r = std::from_chars(b, e, cols[static_cast<std::size_t>(c)]);
            while (r.ptr < e && (*r.ptr == ' ' || *r.ptr == '\t')) ++r.ptr;
            if (r.ec != std::errc() || r.ptr != e) {
                ok = false;
                break;
            }
            start = end + 1;
        }
        if (!ok) {
            if (line_no == 1) continue;  // header row
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'x,re,im' numeric row");
        }
        xs.push_back(cols[0]);
        vs.push_back(Complex(cols[1], cols[2]));
    }
    if (xs.size() < 4) {
        throw ConfigError(path + ": need at least 4 data rows");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw ConfigError(path + ": abscissae must be strictly increasing");
        }
    }
}

}  // namespace

const char* task_name(Task t) {
    switch (t) {
        case Task::CheckA: return "check-a";
        case Task::CheckB: return "check-b";
        case Task::CheckThm3: return "check-thm3";
        case Task::RegionMap: return "region-map";
        case Task::Weyl: return "weyl";
        case Task::Eigs: return "eigs";
        case Task::Resolvent: return "resolvent";
        case Task::Bounds: return "bounds";
        case Task::OracleCompare: return "oracle-compare";
    }
    return "?";
}

void InputFunction::load() {
    if (kind != Kind::Samples || !xs.empty()) return;
    read_samples_csv(path, xs, vs);
}

std::function<Complex(double)> InputFunction::evaluator() const {
    switch (kind) {
        case Kind::ExpDecay: {
            const Complex a = amplitude;
            const double r = rate;
            return [a, r](double x) { return a * std::exp(-r * x); };
        }
        case Kind::Bump: {
            // Fifth power of the normalized parabola: C^4 at the support
            // endpoints, peak value = amplitude at the midpoint.
            const Complex a = amplitude;
            const double l = left, r = right;
            const double s = 4.0 / ((r - l) * (r - l));
            return [a, l, r, s](double x) -> Complex {
                if (x <= l || x >= r) return Complex(0.0, 0.0);
                const double u = s * (x - l) * (r - x);
                const double u2 = u * u;
                return a * (u2 * u2 * u);
            };
        }
        case Kind::Samples: {
            if (xs.empty()) throw ConfigError("sample input used before load()");
            // Piecewise cubic Hermite with centered-difference slopes
            // (one-sided at the ends); zero outside the sampled range.
            const std::vector<double> x = xs;
            const std::vector<Complex> v = vs;
            const std::size_t n = x.size();
            std::vector<Complex> m(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == 0) {
                    m[i] = (v[1] - v[0]) / (x[1] - x[0]);
                } else if (i == n - 1) {
                    m[i] = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
                } else {
                    m[i] = (v[i + 1] - v[i - 1]) / (x[i + 1] - x[i - 1]);
                }
            }
            return [x, v, m](double t) -> Complex {
                if (t < x.front() || t > x.back()) return Complex(0.0, 0.0);
                auto it = std::upper_bound(x.begin(), x.end(), t);
                std::size_t k = it == x.begin()
                                    ? 0
                                    : static_cast<std::size_t>(it - x.begin()) - 1;
                if (k >= x.size() - 1) k = x.size() - 2;
                const double h = x[k + 1] - x[k];
                const double s = (t - x[k]) / h;
                const double s2 = s * s, s3 = s2 * s;
                return (2 * s3 - 3 * s2 + 1) * v[k] + (s3 - 2 * s2 + s) * h * m[k] +
                       (-2 * s3 + 3 * s2) * v[k + 1] + (s3 - s2) * h * m[k + 1];
            };
        }
    }
    throw ConfigError("unreachable input-function kind");
}

void RunConfig::prepare() {
    if (potential_family == "constant") {
        potential = Potential::constant(constant_value);
    } else if (potential_family == "monomial") {
        potential = Potential::monomial(exponent, phase);
    } else if (potential_family == "airy") {
        potential = Potential::airy();
    } else if (potential_family == "polynomial") {
        potential = Potential::polynomial(poly_coeffs);
    } else if (potential_family == "tabulated") {
        std::vector<double> xs;
        std::vector<Complex> qs;
        read_samples_csv(potential_path, xs, qs);
        potential = Potential::tabulated(std::move(xs), std::move(qs));
    } else {
        throw ConfigError("unknown potential family: " + potential_family);
    }
    if (f) f->load();
}

RunConfig parse_run_config(const TomlTable& table) {
    static const std::set<std::string> kSections = {
        "",       "potential", "boundary",  "lambda", "numeric",
        "region", "contour",   "resolvent", "oracle", "output"};
    for (const auto& [name, kv] : table.sections) {
        (void)kv;
        if (kSections.find(name) == kSections.end()) {
            fail_at(table, table.section_lines.at(name), "unknown section [" + name + "]");
        }
    }

    RunConfig cfg;
    cfg.echo = build_echo(table);

    Section root(table, "", {"task"});
    auto task_str = root.str("task");
    if (!task_str) root.missing("task", "every run needs one");
    bool task_found = false;
    for (Task t : {Task::CheckA, Task::CheckB, Task::CheckThm3, Task::RegionMap, Task::Weyl,
                   Task::Eigs, Task::Resolvent, Task::Bounds, Task::OracleCompare}) {
        if (*task_str == task_name(t)) {
            cfg.task = t;
            task_found = true;
            break;
        }
    }
    if (!task_found) {
        fail_at(table, root.raw("task")->line, "unknown task '" + *task_str + "'");
    }

    // [potential]
    Section pot(table, "potential",
                {"family", "value", "exponent", "phase", "coeffs_re", "coeffs_im", "path"});
    if (!pot.present()) fail_cfg(table, "missing [potential] section");
    auto family = pot.str("family");
    if (!family) pot.missing("family", "constant|monomial|airy|polynomial|tabulated");
    cfg.potential_family = *family;
    auto family_allows = [&](std::initializer_list<const char*> keys) {
        std::set<std::string> ok(keys.begin(), keys.end());
        ok.insert("family");
        for (const char* k :
             {"value", "exponent", "phase", "coeffs_re", "coeffs_im", "path"}) {
            if (pot.has(k) && ok.find(k) == ok.end()) {
                fail_at(table, pot.raw(k)->line,
                        std::string("key '") + k + "' does not apply to family '" +
                            cfg.potential_family + "'");
            }
        }
    };
    if (*family == "constant") {
        family_allows({"value"});
        auto v = pot.complex2("value");
        if (!v) pot.missing("value", "constant potential needs [re, im]");
        cfg.constant_value = *v;
    } else if (*family == "monomial") {
        family_allows({"exponent", "phase"});
        auto e = pot.number("exponent");
        if (!e) pot.missing("exponent", "monomial potential needs one");
        if (!(*e > 0.0)) fail_at(table, pot.raw("exponent")->line, "exponent must be > 0");
        cfg.exponent = *e;
        cfg.phase = pot.number("phase").value_or(0.0);
    } else if (*family == "airy") {
        family_allows({});
    } else if (*family == "polynomial") {
        family_allows({"coeffs_re", "coeffs_im"});
        auto re = pot.numbers("coeffs_re");
        if (!re || re->empty()) pot.missing("coeffs_re", "polynomial needs coefficients");
        auto im = pot.numbers("coeffs_im");
        if (im && im->size() != re->size()) {
            fail_at(table, pot.raw("coeffs_im")->line,
                    "coeffs_im must match coeffs_re in length");
        }
        cfg.poly_coeffs.resize(re->size());
        for (std::size_t i = 0; i < re->size(); ++i) {
            cfg.poly_coeffs[i] = Complex((*re)[i], im ? (*im)[i] : 0.0);
        }
    } else if (*family == "tabulated") {
        family_allows({"path"});
        auto p = pot.str("path");
        if (!p) pot.missing("path", "tabulated potential needs a samples file");
        cfg.potential_path = *p;
    } else {
        fail_at(table, pot.raw("family")->line, "unknown family '" + *family + "'");
    }

    // [boundary]
    Section bdy(table, "boundary", {"alpha0", "alpha1"});
    if (auto a0 = bdy.complex2("alpha0")) cfg.bc.alpha0 = *a0;
    if (auto a1 = bdy.complex2("alpha1")) cfg.bc.alpha1 = *a1;
    if (bdy.present() && !bdy.has("alpha0")) cfg.bc.alpha0 = Complex(0.0, 0.0);
    if (std::abs(cfg.bc.alpha0) + std::abs(cfg.bc.alpha1) <= 0.0) {
        fail_cfg(table, "[boundary] needs |alpha0| + |alpha1| > 0");
    }

    // [lambda]
    Section lam(table, "lambda", {"value"});
    if (lam.present()) {
        auto v = lam.complex2("value");
        if (!v) lam.missing("value", "[lambda] needs value = [re, im]");
        cfg.lambda = *v;
    }

    // [numeric]
    Section num(table, "numeric",
                {"tol", "anchor", "x_lo", "x_max", "b_max", "radius_tol", "b_schedule",
                 "condition_c", "eps", "kappa", "delta", "n_grid"});
    cfg.tol = num.number("tol").value_or(cfg.tol);
    if (!(cfg.tol > 0.0)) fail_at(table, num.raw("tol")->line, "tol must be positive");
    if (auto a = num.number("anchor")) {
        if (!(*a >= 0.0)) fail_at(table, num.raw("anchor")->line, "anchor must be >= 0");
        cfg.anchor = *a;
    }
    cfg.x_lo = num.number("x_lo").value_or(0.0);
    if (cfg.x_lo < 0.0) fail_at(table, num.raw("x_lo")->line, "x_lo must be >= 0");
    if (auto xm = num.number("x_max")) {
        if (!(*xm > cfg.x_lo)) fail_at(table, num.raw("x_max")->line, "x_max must exceed x_lo");
        cfg.x_max = *xm;
    }
    cfg.b_max = num.number("b_max").value_or(cfg.b_max);
    if (!(cfg.b_max > 0.0)) fail_at(table, num.raw("b_max")->line, "b_max must be positive");
    cfg.radius_tol = num.number("radius_tol").value_or(cfg.radius_tol);
    if (!(cfg.radius_tol > 0.0)) {
        fail_at(table, num.raw("radius_tol")->line, "radius_tol must be positive");
    }
    cfg.b_schedule = num.numbers("b_schedule").value_or(std::vector<double>{});
    cfg.condition_c = num.number("condition_c").value_or(0.0);
    if (cfg.condition_c < 0.0) {
        fail_at(table, num.raw("condition_c")->line, "condition_c must be >= 0");
    }
    if (auto e = num.number("eps")) {
        if (!(*e > 0.0)) fail_at(table, num.raw("eps")->line, "eps must be positive");
        cfg.eps = *e;
    }
    if (auto k = num.number("kappa")) cfg.kappa = *k;
    if (auto d = num.number("delta")) cfg.delta = *d;
    if (auto g = num.integer("n_grid")) {
        if (*g < 9) fail_at(table, num.raw("n_grid")->line, "n_grid must be at least 9");
        cfg.n_grid = static_cast<int>(*g);
    }

    // [region]
    Section reg(table, "region", {"re", "im", "nx", "ny"});
    if (reg.present()) {
        auto re = reg.pair("re");
        auto im = reg.pair("im");
        if (!re) reg.missing("re", "[region] needs re = [lo, hi]");
        if (!im) reg.missing("im", "[region] needs im = [lo, hi]");
        ComplexRect r;
        r.re_lo = (*re)[0];
        r.re_hi = (*re)[1];
        r.im_lo = (*im)[0];
        r.im_hi = (*im)[1];
        if (!(r.re_hi > r.re_lo) || !(r.im_hi > r.im_lo)) {
            fail_cfg(table, "[region] bounds must satisfy lo < hi");
        }
        cfg.region = r;
        if (auto nx = reg.integer("nx")) {
            if (*nx < 1) fail_at(table, reg.raw("nx")->line, "nx must be >= 1");
            cfg.nx = static_cast<int>(*nx);
        }
        if (auto ny = reg.integer("ny")) {
            if (*ny < 1) fail_at(table, reg.raw("ny")->line, "ny must be >= 1");
            cfg.ny = static_cast<int>(*ny);
        }
    }

    // [contour]
    Section con(table, "contour", {"max_subdivision"});
    if (auto m = con.integer("max_subdivision")) {
        if (*m < 1) fail_at(table, con.raw("max_subdivision")->line,
                            "max_subdivision must be >= 1");
        cfg.max_subdivision = static_cast<int>(*m);
    }

    // [resolvent]
    Section res(table, "resolvent", {"f", "amplitude", "rate", "support", "path"});
    if (res.present()) {
        InputFunction fn;
        auto kind = res.str("f");
        if (!kind) res.missing("f", "exp-decay|bump|samples");
        if (auto a = res.complex2("amplitude")) fn.amplitude = *a;
        if (*kind == "exp-decay") {
            fn.kind = InputFunction::Kind::ExpDecay;
            fn.rate = res.number("rate").value_or(1.0);
            if (!(fn.rate > 0.0)) {
                fail_at(table, res.raw("rate")->line, "rate must be positive");
            }
            if (res.has("support") || res.has("path")) {
                fail_cfg(table, "exp-decay input takes only rate and amplitude");
            }
        } else if (*kind == "bump") {
            fn.kind = InputFunction::Kind::Bump;
            auto sup = res.pair("support");
            if (!sup) res.missing("support", "bump input needs support = [l, r]");
            fn.left = (*sup)[0];
            fn.right = (*sup)[1];
            if (!(fn.left >= 0.0) || !(fn.right > fn.left)) {
                fail_at(table, res.raw("support")->line,
                        "support must satisfy 0 <= l < r");
            }
            if (res.has("rate") || res.has("path")) {
                fail_cfg(table, "bump input takes only support and amplitude");
            }
        } else if (*kind == "samples") {
            fn.kind = InputFunction::Kind::Samples;
            auto p = res.str("path");
            if (!p) res.missing("path", "samples input needs a CSV file");
            fn.path = *p;
            if (res.has("rate") || res.has("support")) {
                fail_cfg(table, "samples input takes only path and amplitude");
            }
        } else {
            fail_at(table, res.raw("f")->line, "unknown input kind '" + *kind + "'");
        }
        cfg.f = std::move(fn);
    }

    // [oracle]
    Section ora(table, "oracle", {"length", "n", "count"});
    cfg.fd_length = ora.number("length").value_or(cfg.fd_length);
    if (!(cfg.fd_length > 0.0)) {
        fail_at(table, ora.raw("length")->line, "length must be positive");
    }
    if (auto n = ora.integer("n")) {
        if (*n < 16) fail_at(table, ora.raw("n")->line, "n must be at least 16");
        cfg.fd_n = static_cast<int>(*n);
    }
    if (auto c = ora.integer("count")) {
        if (*c < 1) fail_at(table, ora.raw("count")->line, "count must be >= 1");
        cfg.fd_count = static_cast<int>(*c);
    }

    // [output]
    Section outp(table, "output", {"dir"});
    cfg.out_dir = outp.str("dir").value_or(cfg.out_dir);

    // Per-task requirements.
    auto need_lambda = [&]() {
        if (!cfg.lambda) {
            fail_cfg(table, std::string("task '") + task_name(cfg.task) +
                                "' needs a [lambda] section");
        }
    };
    auto need_region = [&]() {
        if (!cfg.region) {
            fail_cfg(table, std::string("task '") + task_name(cfg.task) +
                                "' needs a [region] section");
        }
    };
    switch (cfg.task) {
        case Task::CheckA: need_lambda(); break;
        case Task::CheckB:
            need_lambda();
            if (!cfg.eps) fail_cfg(table, "task 'check-b' needs eps in [numeric]");
            break;
        case Task::CheckThm3:
            if (!cfg.kappa || !cfg.delta) {
                fail_cfg(table, "task 'check-thm3' needs kappa and delta in [numeric]");
            }
            if (!(*cfg.kappa > 0.0) || !(*cfg.kappa < 3.141592653589793)) {
                fail_cfg(table, "kappa must lie in (0, pi)");
            }
            if (!(*cfg.delta > 0.0) || !(*cfg.delta < 1.0)) {
                fail_cfg(table, "delta must lie in (0, 1)");
            }
            break;
        case Task::RegionMap: need_region(); break;
        case Task::Weyl: need_lambda(); break;
        case Task::Eigs: need_region(); break;
        case Task::Resolvent:
            need_lambda();
            if (!cfg.f) fail_cfg(table, "task 'resolvent' needs a [resolvent] section");
            break;
        case Task::Bounds:
            if (!cfg.f) fail_cfg(table, "task 'bounds' needs a [resolvent] section");
            break;
        case Task::OracleCompare: need_region(); break;
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(parse_toml_file(path));
}

}  // namespace halfline::tools
