#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "congestion/format.hpp"
#include "congestion/runner.hpp"

namespace congestion {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;

  std::string full() const { return section.empty() ? key : section + "." + key; }
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

const std::set<std::string> kSections = {"grid",  "barrier", "initial", "pressure", "fluid",
                                         "solver", "output", "sweep"};

// ---------------------------------------------------------------------------
// Key table. Each parameter key resolves to a field of the RunConfig for the
// currently selected kind, or to nothing when it does not apply.

using DoubleSlot = std::function<double*(RunConfig&)>;
using IntSlot = std::function<int*(RunConfig&)>;

template <class T>
T* as(auto& variant) {
  return std::get_if<T>(&variant);
}

const std::vector<std::pair<std::string, DoubleSlot>>& double_keys() {
  static const std::vector<std::pair<std::string, DoubleSlot>> keys = {
      {"grid.lx", [](RunConfig& c) { return &c.setup.grid.extents[0]; }},
      {"grid.ly",
       [](RunConfig& c) { return c.setup.grid.dim == 2 ? &c.setup.grid.extents[1] : nullptr; }},

      {"barrier.value",
       [](RunConfig& c) -> double* {
         auto* b = as<ConstantBarrier>(c.setup.barrier);
         return b ? &b->value : nullptr;
       }},
      {"barrier.left",
       [](RunConfig& c) -> double* {
         auto* b = as<TanhStep>(c.setup.barrier);
         return b ? &b->left : nullptr;
       }},
      {"barrier.right",
       [](RunConfig& c) -> double* {
         auto* b = as<TanhStep>(c.setup.barrier);
         return b ? &b->right : nullptr;
       }},
      {"barrier.center",
       [](RunConfig& c) -> double* {
         if (auto* b = as<TanhStep>(c.setup.barrier)) return &b->center;
         if (auto* p = as<PipeProfile>(c.setup.barrier)) return &p->center;
         return nullptr;
       }},
      {"barrier.width",
       [](RunConfig& c) -> double* {
         if (auto* b = as<TanhStep>(c.setup.barrier)) return &b->width;
         if (auto* g = as<GaussianBump>(c.setup.barrier)) return &g->width;
         return nullptr;
       }},
      {"barrier.base",
       [](RunConfig& c) -> double* {
         if (auto* g = as<GaussianBump>(c.setup.barrier)) return &g->base;
         if (auto* p = as<PipeProfile>(c.setup.barrier)) return &p->base;
         return nullptr;
       }},
      {"barrier.amp",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianBump>(c.setup.barrier);
         return g ? &g->amp : nullptr;
       }},
      {"barrier.center_x",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianBump>(c.setup.barrier);
         return g ? &g->center[0] : nullptr;
       }},
      {"barrier.center_y",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianBump>(c.setup.barrier);
         return g ? &g->center[1] : nullptr;
       }},
      {"barrier.depth",
       [](RunConfig& c) -> double* {
         auto* p = as<PipeProfile>(c.setup.barrier);
         return p ? &p->depth : nullptr;
       }},
      {"barrier.half_length",
       [](RunConfig& c) -> double* {
         auto* p = as<PipeProfile>(c.setup.barrier);
         return p ? &p->half_length : nullptr;
       }},

      {"initial.base",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->base : nullptr;
       }},
      {"initial.amp",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->amp : nullptr;
       }},
      {"initial.center_x",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->center[0] : nullptr;
       }},
      {"initial.center_y",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->center[1] : nullptr;
       }},
      {"initial.width",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->width : nullptr;
       }},
      {"initial.velocity_width",
       [](RunConfig& c) -> double* {
         auto* g = as<GaussianPulse>(c.setup.initial);
         return g ? &g->velocity_width : nullptr;
       }},
      {"initial.fraction",
       [](RunConfig& c) -> double* {
         auto* f = as<BarrierFill>(c.setup.initial);
         return f ? &f->fraction : nullptr;
       }},
      {"initial.rho",
       [](RunConfig& c) -> double* {
         auto* u = as<UniformDensity>(c.setup.initial);
         return u ? &u->rho : nullptr;
       }},
      {"initial.u",
       [](RunConfig& c) -> double* {
         if (auto* g = as<GaussianPulse>(c.setup.initial)) return &g->velocity[0];
         if (auto* f = as<BarrierFill>(c.setup.initial)) return &f->velocity[0];
         if (auto* u = as<UniformDensity>(c.setup.initial)) return &u->velocity[0];
         return nullptr;
       }},
      {"initial.v",
       [](RunConfig& c) -> double* {
         if (auto* g = as<GaussianPulse>(c.setup.initial)) return &g->velocity[1];
         if (auto* f = as<BarrierFill>(c.setup.initial)) return &f->velocity[1];
         if (auto* u = as<UniformDensity>(c.setup.initial)) return &u->velocity[1];
         return nullptr;
       }},
      {"initial.rho_mean",
       [](RunConfig& c) -> double* {
         auto* m = as<ManufacturedSolution>(c.setup.initial);
         return m ? &m->rho_mean : nullptr;
       }},
      {"initial.rho_amp",
       [](RunConfig& c) -> double* {
         auto* m = as<ManufacturedSolution>(c.setup.initial);
         return m ? &m->rho_amp : nullptr;
       }},
      {"initial.u_amp",
       [](RunConfig& c) -> double* {
         auto* m = as<ManufacturedSolution>(c.setup.initial);
         return m ? &m->u_amp : nullptr;
       }},

      {"pressure.eps",
       [](RunConfig& c) -> double* {
         if (auto* s = as<Singular>(c.setup.law)) return &s->eps;
         if (auto* t = as<Truncated>(c.setup.law)) return &t->eps;
         return nullptr;
       }},
      {"pressure.alpha",
       [](RunConfig& c) -> double* {
         if (auto* s = as<Singular>(c.setup.law)) return &s->alpha;
         if (auto* t = as<Truncated>(c.setup.law)) return &t->alpha;
         return nullptr;
       }},
      {"pressure.beta",
       [](RunConfig& c) -> double* {
         if (auto* s = as<Singular>(c.setup.law)) return &s->beta;
         if (auto* t = as<Truncated>(c.setup.law)) return &t->beta;
         return nullptr;
       }},
      {"pressure.kappa",
       [](RunConfig& c) -> double* {
         auto* t = as<Truncated>(c.setup.law);
         return t ? &t->kappa : nullptr;
       }},
      {"pressure.cap_K",
       [](RunConfig& c) -> double* {
         auto* t = as<Truncated>(c.setup.law);
         return t ? &t->cap_K : nullptr;
       }},
      {"pressure.delta",
       [](RunConfig& c) -> double* {
         auto* t = as<Truncated>(c.setup.law);
         return t ? &t->delta : nullptr;
       }},
      {"pressure.a",
       [](RunConfig& c) -> double* {
         auto* b = as<Barotropic>(c.setup.law);
         return b ? &b->a : nullptr;
       }},
      {"pressure.gamma_n",
       [](RunConfig& c) -> double* {
         auto* b = as<Barotropic>(c.setup.law);
         return b ? &b->gamma_n : nullptr;
       }},
      {"pressure.c0",
       [](RunConfig& c) -> double* {
         auto* s = as<Sedimentation>(c.setup.law);
         return s ? &s->c0 : nullptr;
       }},
      {"pressure.s_exp",
       [](RunConfig& c) -> double* {
         auto* s = as<Sedimentation>(c.setup.law);
         return s ? &s->s_exp : nullptr;
       }},
      {"pressure.phi_star",
       [](RunConfig& c) -> double* {
         auto* s = as<Sedimentation>(c.setup.law);
         return s ? &s->phi_star : nullptr;
       }},

      {"fluid.mu", [](RunConfig& c) { return &c.setup.fluid.mu; }},
      {"fluid.lambda", [](RunConfig& c) { return &c.setup.fluid.lambda; }},
      {"fluid.gamma", [](RunConfig& c) { return &c.setup.fluid.gamma; }},
      {"fluid.p_coeff", [](RunConfig& c) { return &c.setup.fluid.p_coeff; }},

      {"solver.cfl", [](RunConfig& c) { return &c.solver.cfl; }},
      {"solver.barrier_tol", [](RunConfig& c) { return &c.solver.barrier_tol; }},
      {"solver.t_end", [](RunConfig& c) { return &c.solver.t_end; }},
      {"solver.snapshot_every", [](RunConfig& c) { return &c.solver.snapshot_every; }},

      {"output.delta_c", [](RunConfig& c) { return &c.output.delta_c; }},
  };
  return keys;
}

const std::vector<std::pair<std::string, IntSlot>>& int_keys() {
  static const std::vector<std::pair<std::string, IntSlot>> keys = {
      {"grid.nx", [](RunConfig& c) { return &c.setup.grid.cells[0]; }},
      {"grid.ny",
       [](RunConfig& c) { return c.setup.grid.dim == 2 ? &c.setup.grid.cells[1] : nullptr; }},
      {"solver.max_substeps", [](RunConfig& c) { return &c.solver.max_substeps; }},
      {"output.diagnostics_every", [](RunConfig& c) { return &c.output.diagnostics_every; }},
      {"sweep.workers", [](RunConfig& c) { return &c.sweep.workers; }},
  };
  return keys;
}

const std::set<std::string> kKindKeys = {"grid.dim", "barrier.kind", "initial.kind",
                                         "pressure.kind"};
const std::set<std::string> kOtherKeys = {"scenario",        "seed",         "solver.force_form",
                                          "output.dir",      "output.snapshots", "sweep.param",
                                          "sweep.eps",       "sweep.kappa_delta", "sweep.delta_c"};

bool known_key(const std::string& full) {
  if (kKindKeys.count(full) || kOtherKeys.count(full)) return true;
  for (const auto& [k, _] : double_keys())
    if (k == full) return true;
  for (const auto& [k, _] : int_keys())
    if (k == full) return true;
  return false;
}

std::optional<BarrierSpec> barrier_of_kind(const std::string& kind) {
  if (kind == "constant") return ConstantBarrier{};
  if (kind == "tanh_step") return TanhStep{};
  if (kind == "gaussian_bump") return GaussianBump{};
  if (kind == "pipe_profile") return PipeProfile{};
  return std::nullopt;
}

std::optional<InitialProfile> initial_of_kind(const std::string& kind) {
  if (kind == "gaussian_pulse") return GaussianPulse{};
  if (kind == "barrier_fill") return BarrierFill{};
  if (kind == "uniform") return UniformDensity{};
  if (kind == "manufactured") return ManufacturedSolution{};
  return std::nullopt;
}

std::optional<PressureLaw> law_of_kind(const std::string& kind) {
  if (kind == "singular") return Singular{};
  if (kind == "barotropic") return Barotropic{};
  if (kind == "truncated") return Truncated{};
  if (kind == "sedimentation") return Sedimentation{};
  return std::nullopt;
}

std::optional<bool> parse_bool(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> parse_list(const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) {
    const auto d = parse_double(item);
    if (!d) return std::nullopt;
    out.push_back(*d);
  }
  return out;
}

std::optional<std::vector<std::pair<double, double>>> parse_pairs(const std::string& v) {
  std::vector<std::pair<double, double>> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) return std::nullopt;
    const auto k = parse_double(parts[0]);
    const auto d = parse_double(parts[1]);
    if (!k || !d) return std::nullopt;
    out.emplace_back(*k, *d);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format_double(v[k]);
  return s;
}

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::Eps: return "eps";
    case SweepParam::KappaDelta: return "kappa_delta";
    default: return "none";
  }
}

class Parser {
public:
  std::vector<Entry> entries;
  std::vector<ConfigIssue> issues;

  void read_text(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      std::string s = raw;
      const auto hash = s.find_first_of("#;");
      if (hash != std::string::npos) s.erase(hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          issues.push_back({"[" + section + "]", line, "unterminated section header"});
          continue;
        }
        section = trim(s.substr(1, s.size() - 2));
        if (!kSections.count(section)) issues.push_back({section, line, "unknown section"});
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        issues.push_back({section.empty() ? s : section + "." + s, line, "expected key = value"});
        continue;
      }
      Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
      add(e);
    }
  }

  void read_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      issues.push_back({text, 0, "override must be key=value"});
      return;
    }
    const std::string full = trim(text.substr(0, eq));
    const auto dot = full.find('.');
    Entry e;
    if (dot == std::string::npos) {
      e.key = full;
    } else {
      e.section = full.substr(0, dot);
      e.key = full.substr(dot + 1);
    }
    e.value = trim(text.substr(eq + 1));
    e.line = 0;
    add(e);
  }

private:
  void add(const Entry& e) {
    if (e.key.empty()) {
      issues.push_back({e.full(), e.line, "empty key"});
      return;
    }
    if (!e.section.empty() && !kSections.count(e.section)) {
      issues.push_back({e.full(), e.line, "unknown section"});
      return;
    }
    if (!known_key(e.full())) {
      issues.push_back({e.full(), e.line, "unknown key"});
      return;
    }
    entries.push_back(e);
  }
};

const Entry* last_of(const std::vector<Entry>& entries, const std::string& full) {
  const Entry* found = nullptr;
  for (const auto& e : entries)
    if (e.full() == full) found = &e;
  return found;
}

std::string issues_summary(const std::string& head, const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << head;
  for (const auto& i : issues) {
    os << "\n  " << i.key;
    if (i.line > 0) os << " (line " << i.line << ")";
    os << ": " << i.reason;
  }
  return os.str();
}

std::string key_of_message(const std::string& message, const std::string& fallback) {
  const auto sp = message.find(' ');
  const std::string head = message.substr(0, sp);
  if (head.find('.') != std::string::npos) return head;
  return fallback;
}

void validate_into(const RunConfig& c, const std::map<std::string, int>& lines,
                   std::vector<ConfigIssue>& issues) {
  auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto fail = [&](const std::string& key, const std::string& reason) {
    issues.push_back({key, line_of(key), reason});
  };

  const Grid& g = c.setup.grid;
  if (g.cells[0] < 3) fail("grid.nx", "must be >= 3");
  if (g.dim == 2 && g.cells[1] < 3) fail("grid.ny", "must be >= 3");
  if (!(g.extents[0] > 0.0)) fail("grid.lx", "must be > 0");
  if (g.dim == 2 && !(g.extents[1] > 0.0)) fail("grid.ly", "must be > 0");

  if (const auto* t = std::get_if<TanhStep>(&c.setup.barrier)) {
    if (!(t->width > 0.0)) fail("barrier.width", "must be > 0");
  } else if (const auto* b = std::get_if<GaussianBump>(&c.setup.barrier)) {
    if (!(b->width > 0.0)) fail("barrier.width", "must be > 0");
  } else if (const auto* p = std::get_if<PipeProfile>(&c.setup.barrier)) {
    if (!(p->half_length > 0.0)) fail("barrier.half_length", "must be > 0");
  }

  if (const auto* gp = std::get_if<GaussianPulse>(&c.setup.initial)) {
    if (!(gp->width > 0.0)) fail("initial.width", "must be > 0");
    if (!(gp->velocity_width >= 0.0)) fail("initial.velocity_width", "must be >= 0");
  } else if (std::holds_alternative<ManufacturedSolution>(c.setup.initial) && g.dim != 1) {
    fail("initial.kind", "manufactured initial data requires a 1D grid");
  }

  try {
    validate(c.setup.law);
  } catch (const ParameterError& e) {
    fail(key_of_message(e.what(), "pressure.kind"), e.what());
  }
  try {
    validate(c.setup.fluid);
  } catch (const ParameterError& e) {
    fail(key_of_message(e.what(), "fluid"), e.what());
  }
  try {
    c.solver.validate();
  } catch (const ParameterError& e) {
    fail(key_of_message(e.what(), "solver"), e.what());
  }

  if (c.output.dir.empty()) fail("output.dir", "must not be empty");
  if (c.output.diagnostics_every < 1) fail("output.diagnostics_every", "must be >= 1");
  if (!(c.output.delta_c > 0.0 && c.output.delta_c < 1.0))
    fail("output.delta_c", "must lie in (0,1)");

  const SweepPlan& sw = c.sweep;
  if (sw.workers < 1) fail("sweep.workers", "must be >= 1");
  for (double d : sw.delta_c)
    if (!(d > 0.0 && d < 1.0)) fail("sweep.delta_c", "entries must lie in (0,1)");
  if (sw.param == SweepParam::Eps) {
    if (sw.eps.empty()) fail("sweep.eps", "sweep plan is empty");
    std::set<double> seen;
    for (double e : sw.eps) {
      if (!(e > 0.0)) fail("sweep.eps", "values must be positive");
      if (!seen.insert(e).second) fail("sweep.eps", "values must be distinct");
    }
    if (!std::holds_alternative<Singular>(c.setup.law) &&
        !std::holds_alternative<Truncated>(c.setup.law))
      fail("sweep.param", "eps sweeps need a singular or truncated pressure law");
  } else if (sw.param == SweepParam::KappaDelta) {
    if (sw.kappa_delta.empty()) fail("sweep.kappa_delta", "sweep plan is empty");
    std::set<std::pair<double, double>> seen;
    for (const auto& kd : sw.kappa_delta) {
      if (!(kd.first > 0.0) || !(kd.second > 0.0 && kd.second < 1.0))
        fail("sweep.kappa_delta", "needs kappa > 0 and delta in (0,1)");
      if (!seen.insert(kd).second) fail("sweep.kappa_delta", "pairs must be distinct");
    }
    if (!std::holds_alternative<Truncated>(c.setup.law))
      fail("sweep.param", "kappa_delta sweeps need the truncated pressure law");
  }
}

}  // namespace

std::size_t SweepPlan::size() const {
  switch (param) {
    case SweepParam::Eps: return eps.size();
    case SweepParam::KappaDelta: return kappa_delta.size();
    default: return 0;
  }
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Parser p;
  p.read_text(text);
  for (const auto& o : overrides) p.read_override(o);

  RunConfig cfg;
  std::map<std::string, int> lines;

  if (const Entry* e = last_of(p.entries, "scenario")) {
    cfg.scenario = e->value;
    lines["scenario"] = e->line;
  }
  try {
    cfg.setup = make_scenario(cfg.scenario);
  } catch (const UnknownScenario& ex) {
    std::vector<ConfigIssue> issues = p.issues;
    issues.push_back({"scenario", lines["scenario"], ex.what()});
    throw ValidationError(issues_summary("invalid configuration", issues), issues);
  }
  cfg.solver.t_end = cfg.setup.t_end;
  cfg.solver.snapshot_every = cfg.setup.snapshot_every;

  // Kinds first: they decide which parameter keys exist.
  if (const Entry* e = last_of(p.entries, "grid.dim")) {
    lines["grid.dim"] = e->line;
    const auto d = parse_int(e->value);
    if (!d || (*d != 1 && *d != 2)) {
      p.issues.push_back({"grid.dim", e->line, "must be 1 or 2"});
    } else if (*d != cfg.setup.grid.dim) {
      const Grid old = cfg.setup.grid;
      cfg.setup.grid = *d == 1 ? Grid::line(old.extents[0], old.cells[0])
                               : Grid::rect(old.extents[0], old.extents[0], old.cells[0],
                                            old.cells[0]);
    }
  }
  auto apply_kind = [&](const std::string& full, auto& slot, auto make, auto current) {
    const Entry* e = last_of(p.entries, full);
    if (!e) return;
    lines[full] = e->line;
    auto fresh = make(e->value);
    if (!fresh) {
      p.issues.push_back({full, e->line, "unknown kind '" + e->value + "'"});
      return;
    }
    if (current(slot) != e->value) slot = *fresh;
  };
  apply_kind("barrier.kind", cfg.setup.barrier, barrier_of_kind,
             [](const BarrierSpec& s) { return barrier_kind(s); });
  apply_kind("initial.kind", cfg.setup.initial, initial_of_kind,
             [](const InitialProfile& s) { return initial_kind(s); });
  apply_kind("pressure.kind", cfg.setup.law, law_of_kind,
             [](const PressureLaw& s) { return std::string(law_kind(s)); });

  for (const Entry& e : p.entries) {
    const std::string full = e.full();
    if (kKindKeys.count(full) || full == "scenario") continue;
    lines[full] = e.line;
    auto bad = [&](const std::string& reason) { p.issues.push_back({full, e.line, reason}); };

    bool handled = false;
    for (const auto& [k, slot] : double_keys()) {
      if (k != full) continue;
      handled = true;
      double* target = slot(cfg);
      if (!target) {
        bad("not a parameter of the selected kind");
      } else if (const auto v = parse_double(e.value)) {
        *target = *v;
      } else {
        bad("expected a number, got '" + e.value + "'");
      }
    }
    for (const auto& [k, slot] : int_keys()) {
      if (k != full) continue;
      handled = true;
      int* target = slot(cfg);
      if (!target) {
        bad("not a parameter of the selected kind");
      } else if (const auto v = parse_int(e.value)) {
        *target = static_cast<int>(*v);
      } else {
        bad("expected an integer, got '" + e.value + "'");
      }
    }
    if (handled) continue;

    if (full == "seed") {
      if (const auto v = parse_int(e.value)) cfg.seed = *v;
      else bad("expected an integer, got '" + e.value + "'");
    } else if (full == "solver.force_form") {
      if (e.value == "potential") cfg.solver.force_form = ForceForm::Potential;
      else if (e.value == "direct") cfg.solver.force_form = ForceForm::Direct;
      else bad("expected potential or direct");
    } else if (full == "output.dir") {
      cfg.output.dir = e.value;
    } else if (full == "output.snapshots") {
      if (const auto v = parse_bool(e.value)) cfg.output.snapshots = *v;
      else bad("expected true or false");
    } else if (full == "sweep.param") {
      if (e.value == "eps") cfg.sweep.param = SweepParam::Eps;
      else if (e.value == "kappa_delta") cfg.sweep.param = SweepParam::KappaDelta;
      else if (e.value == "none") cfg.sweep.param = SweepParam::None;
      else bad("expected eps, kappa_delta or none");
    } else if (full == "sweep.eps" || full == "sweep.delta_c") {
      if (const auto v = parse_list(e.value)) {
        (full == "sweep.eps" ? cfg.sweep.eps : cfg.sweep.delta_c) = *v;
      } else {
        bad("expected a comma separated list of numbers");
      }
    } else if (full == "sweep.kappa_delta") {
      if (const auto v = parse_pairs(e.value)) cfg.sweep.kappa_delta = *v;
      else bad("expected a comma separated list of kappa:delta pairs");
    }
  }

  if (!p.issues.empty()) throw ParseError(issues_summary("could not parse configuration", p.issues), p.issues);

  cfg.setup.t_end = cfg.solver.t_end;
  cfg.setup.snapshot_every = cfg.solver.snapshot_every;

  std::vector<ConfigIssue> invalid;
  validate_into(cfg, lines, invalid);
  if (!invalid.empty()) throw ValidationError(issues_summary("invalid configuration", invalid), invalid);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

void validate_config(const RunConfig& cfg) {
  std::vector<ConfigIssue> issues;
  validate_into(cfg, {}, issues);
  if (!issues.empty()) throw ValidationError(issues_summary("invalid configuration", issues), issues);
}

std::string serialize_config(const RunConfig& cfg) {
  RunConfig c = cfg;
  std::ostringstream os;
  os << "scenario = " << c.scenario << "\n";
  os << "seed = " << c.seed << "\n";

  auto section = [&](const std::string& name, const std::string& kind_key,
                     const std::string& kind_value) {
    os << "\n[" << name << "]\n";
    if (!kind_key.empty()) os << kind_key << " = " << kind_value << "\n";
    const std::string prefix = name + ".";
    for (const auto& [k, slot] : int_keys()) {
      if (k.rfind(prefix, 0) != 0) continue;
      if (const int* v = slot(c)) os << k.substr(prefix.size()) << " = " << *v << "\n";
    }
    for (const auto& [k, slot] : double_keys()) {
      if (k.rfind(prefix, 0) != 0) continue;
      if (const double* v = slot(c)) os << k.substr(prefix.size()) << " = " << format_double(*v) << "\n";
    }
  };

  section("grid", "dim", std::to_string(c.setup.grid.dim));
  section("barrier", "kind", barrier_kind(c.setup.barrier));
  section("initial", "kind", initial_kind(c.setup.initial));
  section("pressure", "kind", std::string(law_kind(c.setup.law)));
  section("fluid", "", "");
  section("solver", "", "");
  os << "force_form = " << (c.solver.force_form == ForceForm::Direct ? "direct" : "potential")
     << "\n";
  section("output", "", "");
  os << "dir = " << c.output.dir << "\n";
  os << "snapshots = " << (c.output.snapshots ? "true" : "false") << "\n";
  section("sweep", "", "");
  os << "param = " << sweep_param_name(c.sweep.param) << "\n";
  os << "eps = " << join(c.sweep.eps) << "\n";
  os << "kappa_delta = ";
  for (std::size_t k = 0; k < c.sweep.kappa_delta.size(); ++k)
    os << (k ? ", " : "") << format_double(c.sweep.kappa_delta[k].first) << ":"
       << format_double(c.sweep.kappa_delta[k].second);
  os << "\n";
  os << "delta_c = " << join(c.sweep.delta_c) << "\n";
  return os.str();
}

}  // namespace congestion
