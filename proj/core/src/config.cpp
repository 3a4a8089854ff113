#include "cascade/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cascade/error.hpp"
#include "cascade/format.hpp"

namespace cascade {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kModelNames{{
    {ModelKind::goy, "goy"},
    {ModelKind::finance, "finance"},
    {ModelKind::equilibrium, "equilibrium"},
    {ModelKind::pao, "pao"},
    {ModelKind::tree, "tree"},
}};

// ---- value <-> text ------------------------------------------------------

bool from_text(std::string_view s, double& v) { return parse_double(s, v); }

bool from_text(std::string_view s, std::int64_t& v) {
    long long x = 0;
    if (!parse_int(s, x)) return false;
    v = x;
    return true;
}

bool from_text(std::string_view s, std::uint64_t& v) {
    s = trim(s);
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && end == s.data() + s.size()) return true;
    long long x = 0;
    if (!parse_int(s, x) || x < 0) return false;
    v = static_cast<std::uint64_t>(x);
    return true;
}

bool from_text(std::string_view s, bool& v) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes") { v = true; return true; }
    if (s == "false" || s == "0" || s == "no") { v = false; return true; }
    return false;
}

bool from_text(std::string_view s, std::filesystem::path& v) {
    s = trim(s);
    if (s.empty()) return false;
    v = std::filesystem::path(std::string(s));
    return true;
}

bool from_text(std::string_view s, TimeScheme& v) {
    s = trim(s);
    if (s == "rk4") { v = TimeScheme::rk4; return true; }
    if (s == "if_rk4") { v = TimeScheme::if_rk4; return true; }
    return false;
}

bool from_text(std::string_view s, FinanceMode& v) {
    s = trim(s);
    if (s == "literal") { v = FinanceMode::literal; return true; }
    if (s == "flux_form") { v = FinanceMode::flux_form; return true; }
    return false;
}

bool from_text(std::string_view s, SinkLaw& v) {
    s = trim(s);
    if (s == "linear") { v = SinkLaw::linear; return true; }
    if (s == "outflow") { v = SinkLaw::outflow; return true; }
    return false;
}

// "shell:re:im; shell:re:im"; empty text means no forcing.
bool from_text(std::string_view s, std::vector<ForcingTerm>& v) {
    std::vector<ForcingTerm> out;
    s = trim(s);
    while (!s.empty()) {
        auto semi = s.find(';');
        auto item = trim(s.substr(0, semi));
        s = semi == std::string_view::npos ? std::string_view{} : trim(s.substr(semi + 1));
        if (item.empty()) continue;
        auto c1 = item.find(':');
        auto c2 = c1 == std::string_view::npos ? c1 : item.find(':', c1 + 1);
        if (c2 == std::string_view::npos) return false;
        ForcingTerm term;
        double re = 0.0, im = 0.0;
        if (!from_text(item.substr(0, c1), term.shell)) return false;
        if (!parse_double(item.substr(c1 + 1, c2 - c1 - 1), re)) return false;
        if (!parse_double(item.substr(c2 + 1), im)) return false;
        term.amplitude = {re, im};
        out.push_back(term);
    }
    v = std::move(out);
    return true;
}

std::string to_text(double v) { return format_double(v); }
std::string to_text(std::int64_t v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::filesystem::path& v) { return v.string(); }
std::string to_text(TimeScheme v) { return v == TimeScheme::rk4 ? "rk4" : "if_rk4"; }
std::string to_text(FinanceMode v) { return v == FinanceMode::literal ? "literal" : "flux_form"; }
std::string to_text(SinkLaw v) { return v == SinkLaw::linear ? "linear" : "outflow"; }

std::string to_text(const std::vector<ForcingTerm>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += "; ";
        out += std::to_string(v[i].shell) + ":" + format_double(v[i].amplitude.real()) + ":" +
               format_double(v[i].amplitude.imag());
    }
    return out;
}

// ---- field table ---------------------------------------------------------

struct Field {
    std::string section; // "" for top-level keys
    std::string key;
    // Empty for common sections; otherwise the model whose params it edits.
    std::optional<ModelKind> model;
    std::function<bool(SimConfig&, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;

    std::string dotted() const { return section.empty() ? key : section + "." + key; }
};

template <class Sub, class T>
Field common_field(std::string section, std::string key, Sub SimConfig::*sub, T Sub::*member) {
    return Field{std::move(section), std::move(key), std::nullopt,
                 [sub, member](SimConfig& c, std::string_view s) { return from_text(s, c.*sub.*member); },
                 [sub, member](const SimConfig& c) { return to_text(c.*sub.*member); }};
}

template <class Section, class T>
Field model_field(ModelKind model, std::string key, T Section::*member) {
    return Field{std::string(to_string(model)), std::move(key), model,
                 [member](SimConfig& c, std::string_view s) {
                     return from_text(s, std::get<Section>(c.params).*member);
                 },
                 [member](const SimConfig& c) { return to_text(std::get<Section>(c.params).*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(Field{"", "seed", std::nullopt,
                          [](SimConfig& c, std::string_view s) { return from_text(s, c.seed); },
                          [](const SimConfig& c) { return to_text(c.seed); }});

        f.push_back(common_field("grid", "k0", &SimConfig::grid, &GridSpec::k0));
        f.push_back(common_field("grid", "lambda", &SimConfig::grid, &GridSpec::lambda));
        f.push_back(common_field("grid", "n_shells", &SimConfig::grid, &GridSpec::n_shells));

        f.push_back(common_field("integrator", "dt", &SimConfig::integrator, &IntegratorSpec::dt));
        f.push_back(common_field("integrator", "t_end", &SimConfig::integrator, &IntegratorSpec::t_end));
        f.push_back(common_field("integrator", "transient_fraction", &SimConfig::integrator,
                                 &IntegratorSpec::transient_fraction));
        f.push_back(common_field("integrator", "scheme", &SimConfig::integrator, &IntegratorSpec::scheme));
        f.push_back(common_field("integrator", "sample_every", &SimConfig::integrator,
                                 &IntegratorSpec::sample_every));
        f.push_back(common_field("integrator", "steady_tol", &SimConfig::integrator,
                                 &IntegratorSpec::steady_tol));

        using G = GoySection;
        f.push_back(model_field(ModelKind::goy, "a1", &G::a1));
        f.push_back(model_field(ModelKind::goy, "a2", &G::a2));
        f.push_back(model_field(ModelKind::goy, "a3", &G::a3));
        f.push_back(model_field(ModelKind::goy, "nu", &G::nu));
        f.push_back(model_field(ModelKind::goy, "forcing", &G::forcing));
        f.push_back(model_field(ModelKind::goy, "init_amplitude", &G::init_amplitude));
        f.push_back(model_field(ModelKind::goy, "init_shells", &G::init_shells));
        f.push_back(model_field(ModelKind::goy, "plateau_tol", &G::plateau_tol));

        using F = FinanceSection;
        f.push_back(model_field(ModelKind::finance, "a", &F::a));
        f.push_back(model_field(ModelKind::finance, "alpha", &F::alpha));
        f.push_back(model_field(ModelKind::finance, "b", &F::b));
        f.push_back(model_field(ModelKind::finance, "beta", &F::beta));
        f.push_back(model_field(ModelKind::finance, "q", &F::q));
        f.push_back(model_field(ModelKind::finance, "mode", &F::mode));
        f.push_back(model_field(ModelKind::finance, "sink_law", &F::sink_law));
        f.push_back(model_field(ModelKind::finance, "sink", &F::sink));
        f.push_back(model_field(ModelKind::finance, "w_init", &F::w_init));

        using E = EquilibriumSection;
        f.push_back(model_field(ModelKind::equilibrium, "n_agents", &E::n_agents));
        f.push_back(model_field(ModelKind::equilibrium, "mean_wealth", &E::mean_wealth));
        f.push_back(model_field(ModelKind::equilibrium, "n_steps", &E::n_steps));
        f.push_back(model_field(ModelKind::equilibrium, "n_bins", &E::n_bins));

        using P = PaoSection;
        f.push_back(model_field(ModelKind::pao, "k_ko", &P::k_ko));
        f.push_back(model_field(ModelKind::pao, "eps_u", &P::eps_u));
        f.push_back(model_field(ModelKind::pao, "nu", &P::nu));
        f.push_back(model_field(ModelKind::pao, "k_min_factor", &P::k_min_factor));
        f.push_back(model_field(ModelKind::pao, "k_max_factor", &P::k_max_factor));
        f.push_back(model_field(ModelKind::pao, "n_points", &P::n_points));

        using T = TreeSection;
        f.push_back(model_field(ModelKind::tree, "levels", &T::levels));
        f.push_back(model_field(ModelKind::tree, "branching", &T::branching));
        f.push_back(model_field(ModelKind::tree, "budget", &T::budget));
        f.push_back(model_field(ModelKind::tree, "pilferage", &T::pilferage));

        f.push_back(common_field("output", "dir", &SimConfig::output, &OutputSpec::dir));
        f.push_back(common_field("output", "emit_plots", &SimConfig::output, &OutputSpec::emit_plots));
        f.push_back(common_field("output", "write_energy", &SimConfig::output, &OutputSpec::write_energy));
        return f;
    }();
    return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
    for (const auto& f : fields())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

bool is_model_section(std::string_view name) { return parse_model_kind(name).has_value(); }

bool is_known_section(std::string_view name) {
    return is_model_section(name) || name == "grid" || name == "integrator" || name == "output";
}

void apply(SimConfig& cfg, const Field& field, std::string_view value) {
    if (field.model && *field.model != cfg.model)
        throw ConfigError("params", "params/model mismatch: key " + field.dotted() +
                                        " does not apply to model " + std::string(to_string(cfg.model)));
    if (!field.set(cfg, value))
        throw ConfigError(field.dotted(), "invalid value '" + std::string(value) + "' for " + field.dotted());
}

void throw_if_invalid(const SimConfig& cfg) {
    auto violations = validate_config(cfg);
    if (violations.empty()) return;
    std::string msg;
    for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += v.message;
    }
    throw ConfigError(violations.front().key, msg);
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
};

} // namespace

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kModelNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (const auto& [k, n] : kModelNames)
        if (n == name) return k;
    return std::nullopt;
}

SimConfig default_config(ModelKind model) {
    SimConfig cfg;
    cfg.model = model;
    switch (model) {
    case ModelKind::goy:
        cfg.params = GoySection{};
        cfg.integrator.t_end = 500.0;
        break;
    case ModelKind::finance:
        cfg.params = FinanceSection{};
        cfg.grid.n_shells = 20;
        cfg.integrator.dt = 2e-3;
        cfg.integrator.t_end = 5e4;
        cfg.integrator.sample_every = 100;
        break;
    case ModelKind::equilibrium:
        cfg.params = EquilibriumSection{};
        break;
    case ModelKind::pao:
        cfg.params = PaoSection{};
        break;
    case ModelKind::tree:
        cfg.params = TreeSection{};
        break;
    }
    return cfg;
}

std::vector<Violation> validate_config(const SimConfig& cfg) {
    std::vector<Violation> out;
    auto check = [&out](bool ok, const char* key, const char* message) {
        if (!ok) out.push_back({key, message});
    };

    check(cfg.grid.k0 > 0.0 && std::isfinite(cfg.grid.k0), "grid.k0", "grid.k0 must be positive");
    check(cfg.grid.lambda > 1.0 && std::isfinite(cfg.grid.lambda), "grid.lambda", "grid.lambda must exceed 1");
    check(cfg.grid.n_shells >= 4, "grid.n_shells", "grid.n_shells must be at least 4");

    const auto& in = cfg.integrator;
    check(in.dt > 0.0 && std::isfinite(in.dt), "integrator.dt", "integrator.dt must be positive");
    check(in.t_end > in.dt && std::isfinite(in.t_end), "integrator.t_end",
          "integrator.t_end must exceed integrator.dt");
    check(in.transient_fraction >= 0.0 && in.transient_fraction < 1.0, "integrator.transient_fraction",
          "integrator.transient_fraction must lie in [0, 1)");
    check(in.sample_every >= 1, "integrator.sample_every", "integrator.sample_every must be at least 1");
    check(in.steady_tol > 0.0, "integrator.steady_tol", "integrator.steady_tol must be positive");
    check(!cfg.output.dir.empty(), "output.dir", "output.dir must not be empty");

    const bool matches = std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            switch (cfg.model) {
            case ModelKind::goy: return std::is_same_v<P, GoySection>;
            case ModelKind::finance: return std::is_same_v<P, FinanceSection>;
            case ModelKind::equilibrium: return std::is_same_v<P, EquilibriumSection>;
            case ModelKind::pao: return std::is_same_v<P, PaoSection>;
            case ModelKind::tree: return std::is_same_v<P, TreeSection>;
            }
            return false;
        },
        cfg.params);
    if (!matches) {
        out.push_back({"params", "params/model mismatch"});
        return out;
    }

    if (const auto* g = std::get_if<GoySection>(&cfg.params)) {
        check(g->nu >= 0.0, "goy.nu", "goy.nu must be nonnegative");
        for (const auto& f : g->forcing) {
            if (f.shell < 0 || f.shell >= cfg.grid.n_shells) {
                out.push_back({"goy.forcing", "goy.forcing shell index out of range"});
                break;
            }
        }
        check(g->init_amplitude >= 0.0, "goy.init_amplitude", "goy.init_amplitude must be nonnegative");
        check(g->init_shells >= 0 && g->init_shells <= cfg.grid.n_shells, "goy.init_shells",
              "goy.init_shells must lie in [0, n_shells]");
        check(g->plateau_tol > 0.0 && g->plateau_tol < 1.0, "goy.plateau_tol",
              "goy.plateau_tol must lie in (0, 1)");
    } else if (const auto* f = std::get_if<FinanceSection>(&cfg.params)) {
        check(f->a > 0.0, "finance.a", "finance.a must be positive");
        check(f->b >= 0.0, "finance.b", "finance.b must be nonnegative");
        check(f->q >= 0.0, "finance.q", "finance.q must be nonnegative");
        check(f->sink >= 0.0, "finance.sink", "finance.sink must be nonnegative");
        check(f->w_init >= 0.0, "finance.w_init", "finance.w_init must be nonnegative");
        check(std::isfinite(f->alpha) && std::isfinite(f->beta), "finance.alpha",
              "finance.alpha and finance.beta must be finite");
    } else if (const auto* e = std::get_if<EquilibriumSection>(&cfg.params)) {
        check(e->n_agents >= 2, "equilibrium.n_agents", "equilibrium.n_agents must be at least 2");
        check(e->mean_wealth > 0.0, "equilibrium.mean_wealth", "equilibrium.mean_wealth must be positive");
        check(e->n_steps >= 0, "equilibrium.n_steps", "equilibrium.n_steps must be nonnegative");
        check(e->n_bins >= 2, "equilibrium.n_bins", "equilibrium.n_bins must be at least 2");
    } else if (const auto* p = std::get_if<PaoSection>(&cfg.params)) {
        check(p->k_ko > 0.0, "pao.k_ko", "pao.k_ko must be positive");
        check(p->eps_u > 0.0, "pao.eps_u", "pao.eps_u must be positive");
        check(p->nu > 0.0, "pao.nu", "pao.nu must be positive");
        check(p->k_min_factor > 0.0 && p->k_min_factor < p->k_max_factor, "pao.k_min_factor",
              "pao.k_min_factor must be positive and below pao.k_max_factor");
        check(p->n_points >= 2, "pao.n_points", "pao.n_points must be at least 2");
    } else if (const auto* t = std::get_if<TreeSection>(&cfg.params)) {
        check(t->levels >= 1, "tree.levels", "tree.levels must be at least 1");
        check(t->branching >= 2, "tree.branching", "tree.branching must be at least 2");
        check(t->budget > 0.0, "tree.budget", "tree.budget must be positive");
        check(t->pilferage >= 0.0 && t->pilferage < 1.0, "tree.pilferage", "tree.pilferage must lie in [0, 1)");
    }
    return out;
}

SimConfig parse_config(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", "config parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }

    std::vector<Entry> entries;
    std::set<std::string> sections;
    std::optional<std::string> model_text;
    for (const auto& [name, node] : tree) {
        if (node.empty() && !is_known_section(name)) {
            if (name == "model")
                model_text = node.data();
            else
                entries.push_back({"", name, node.data()});
            continue;
        }
        if (!is_known_section(name)) throw ConfigError(name, "unknown config section [" + name + "]");
        sections.insert(name);
        for (const auto& [key, leaf] : node) entries.push_back({name, key, leaf.data()});
    }

    ModelKind model = ModelKind::goy;
    if (model_text) {
        auto parsed = parse_model_kind(trim(*model_text));
        if (!parsed) throw ConfigError("model", "unknown model '" + *model_text + "'");
        model = *parsed;
    } else {
        std::vector<ModelKind> present;
        for (const auto& s : sections)
            if (auto m = parse_model_kind(s)) present.push_back(*m);
        if (present.size() == 1) model = present.front();
    }

    for (const auto& s : sections) {
        if (is_model_section(s) && *parse_model_kind(s) != model)
            throw ConfigError("params", "params/model mismatch: model is " + std::string(to_string(model)) +
                                            " but config has a [" + s + "] block");
    }

    SimConfig cfg = default_config(model);
    bool sink_given = false;
    for (const auto& e : entries) {
        const Field* field = find_field(e.section, e.key);
        const std::string dotted = e.section.empty() ? e.key : e.section + "." + e.key;
        if (!field) throw ConfigError(dotted, "unknown config key " + dotted);
        apply(cfg, *field, e.value);
        if (dotted == "finance.sink") sink_given = true;
    }
    if (auto* f = std::get_if<FinanceSection>(&cfg.params); f && !sink_given) f->sink = 10.0 * f->a;

    throw_if_invalid(cfg);
    return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_config_text(const SimConfig& cfg) {
    std::ostringstream out;
    out << "model = " << to_string(cfg.model) << "\n";
    const std::string model_section(to_string(cfg.model));
    std::string current;
    for (const auto& f : fields()) {
        if (f.model && *f.model != cfg.model) continue;
        if (f.section != current) {
            out << "\n[" << f.section << "]\n";
            current = f.section;
        }
        out << f.key << " = " << f.get(cfg) << "\n";
    }
    return out.str();
}

SimConfig with_override(const SimConfig& cfg, std::string_view dotted_key, std::string_view value) {
    std::string_view section, key = dotted_key;
    if (auto dot = dotted_key.find('.'); dot != std::string_view::npos) {
        section = dotted_key.substr(0, dot);
        key = dotted_key.substr(dot + 1);
    }
    const Field* field = find_field(section, key);
    if (!field) throw ConfigError(std::string(dotted_key), "unknown config key " + std::string(dotted_key));
    SimConfig out = cfg;
    apply(out, *field, value);
    throw_if_invalid(out);
    return out;
}

} // namespace cascade
