// qst: command-line front end.
//
// Exit codes: 0 success, 2 usage or parse error, 3 check failure,
// 4 invalid input data.

#include "workspace.hpp"

#include "qst/evaluator.hpp"
#include "qst/formula.hpp"
#include "qst/io.hpp"
#include "qst/lattice.hpp"
#include "qst/quantum_reals.hpp"
#include "qst/verification.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace qst;
using namespace qst::cli;

namespace {

enum Exit { ok = 0, usage = 2, check_failed = 3, bad_data = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string session;
  bool trace = false;
  bool as_json = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

json parse_json_arg(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("argument is not JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Workspace load(const Options& o) {
  if (o.session.empty()) return {};
  return Workspace::from_json(read_json_file(o.session));
}

void save(const Options& o, const Workspace& w) {
  if (o.session.empty()) return;
  std::ofstream out(o.session);
  if (!out) throw DataError("cannot write " + o.session);
  out << w.doc.dump(2) << '\n';
}

void emit(const Options& o, const json& doc, const std::string& text) {
  if (o.as_json) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

template <OrthoLattice L>
json value_doc(const Universe<L>& u, const typename L::Element& v) {
  return {{"text", u.lattice.describe(v)}, {"value", value_to_json(u.lattice, v)}};
}

std::string tagged(const mpq_class& q) { return "exact " + rational_to_string(q); }

// lattice

int cmd_lattice(const Options& o, const std::string& name, const std::string& def) {
  Workspace w = load(o);
  if (!def.empty()) {
    if (name.empty()) throw UsageError("--def needs a lattice name");
    json lattices = w.doc.value("lattices", json::object());
    lattices[name] = parse_json_arg(def);
    w.doc["lattices"] = lattices;
    w = Workspace::from_json(w.doc);
    save(o, w);
  }
  json doc = json::object();
  std::ostringstream text;
  for (auto& [n, any] : w.lattices) {
    if (!name.empty() && n != name) continue;
    std::visit(
        [&](auto& u) {
          const LatticeSpec spec = spec_of(u.lattice);
          json values = json::object();
          text << n << ": " << spec.describe() << '\n';
          for (const auto& [vn, v] : u.values) {
            text << "  value " << vn << " = " << u.lattice.describe(v) << '\n';
            values[vn] = value_doc(u, v);
          }
          json sets = json::array(), frags = json::array();
          for (const auto& [sn, _] : u.sets) sets.push_back(sn);
          for (const auto& [fn, f] : u.fragments) {
            frags.push_back(fn);
            text << "  fragment " << fn << ": " << f->size() << " sets\n";
          }
          if (!u.sets.empty()) text << "  sets: " << u.sets.size() << '\n';
          doc[n] = {{"lattice", to_json(spec)}, {"values", values}, {"sets", sets}, {"fragments", frags}};
        },
        any);
  }
  if (!name.empty() && !w.lattices.count(name)) throw std::out_of_range("no lattice named '" + name + "'");
  emit(o, doc, text.str());
  return ok;
}

// set

template <OrthoLattice L>
void describe_set(const Universe<L>& u, const std::string& name, const QSetPtr<L>& s, bool export_fragment, json& doc,
                  std::ostringstream& text) {
  const std::string literal = qset_to_literal<L>(u.lattice, *s, [&](const auto& v) { return u.value_name(v); });
  std::vector<typename L::Element> hv;
  collect_hereditary_values(u.lattice, *s, hv);
  const Fragment<L> closure(u.lattice, {s});
  text << (name.empty() ? "set" : name) << " = " << literal << '\n';
  text << "  lattice: " << u.name << '\n';
  text << "  rank: " << s->rank() << ", entries: " << s->size() << ", closure: " << closure.size() << " sets\n";
  json values = json::array();
  std::string names;
  for (const auto& v : hv) {
    values.push_back(u.value_name(v));
    names += (names.empty() ? "" : ", ") + u.value_name(v);
  }
  text << "  hereditary values: {" << names << "}\n";
  const auto comm = qset_commutator(u.lattice, {s});
  text << "  commutator: " << u.lattice.describe(comm) << '\n';
  doc = {{"name", name},
         {"lattice", u.name},
         {"literal", literal},
         {"rank", s->rank()},
         {"entries", s->size()},
         {"closure", closure.size()},
         {"hereditary_values", values},
         {"commutator", value_doc(u, comm)}};
  if (export_fragment) {
    doc["fragment"] = fragment_to_json(closure);
    text << fragment_to_json(closure).dump(2) << '\n';
  }
}

int cmd_set(const Options& o, const std::string& name, const std::string& lattice_name, const std::string& literal,
            bool export_fragment) {
  Workspace w = load(o);
  json doc = json::object();
  std::ostringstream text;
  if (!literal.empty()) {
    AnyUniverse& any = w.pick_lattice(lattice_name);
    std::visit(
        [&](auto& u) {
          const auto s = parse_qset_literal(u.lattice, literal, u.scope());
          describe_set(u, name, s, export_fragment, doc, text);
          if (!name.empty() && !o.session.empty()) {
            json sets = w.doc.value("sets", json::object());
            sets[name] = {{"lattice", u.name}, {"literal", literal}};
            w.doc["sets"] = sets;
            Workspace::from_json(w.doc);  // validates before writing
            save(o, w);
          }
        },
        any);
  } else if (!name.empty()) {
    const std::string owner = w.owner_of_set(name);
    if (owner.empty()) throw std::out_of_range("no set named '" + name + "'");
    std::visit([&](auto& u) { describe_set(u, name, u.sets.at(name), export_fragment, doc, text); }, w.lattice(owner));
  } else {
    doc = json::array();
    for (auto& [n, any] : w.lattices) {
      std::visit(
          [&](auto& u) {
            for (const auto& [sn, s] : u.sets) {
              json one;
              std::ostringstream t;
              describe_set(u, sn, s, false, one, t);
              doc.push_back(one);
              text << t.str();
            }
          },
          any);
    }
  }
  emit(o, doc, text.str());
  return ok;
}

// obs, state

std::vector<mpq_class> parse_grid(const std::string& text) {
  std::vector<mpq_class> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_rational(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

int cmd_obs(const Options& o, const std::string& name, const std::string& def, const std::string& grid) {
  Workspace w = load(o);
  if (!def.empty()) {
    if (name.empty()) throw UsageError("--def needs an observable name");
    json obs = w.doc.value("observables", json::object());
    obs[name] = parse_json_arg(def);
    w.doc["observables"] = obs;
    w = Workspace::from_json(w.doc);
    save(o, w);
  }
  json doc = json::object();
  std::ostringstream text;
  for (const auto& [n, sd] : w.observables) {
    if (!name.empty() && n != name) continue;
    text << n << ": dimension " << sd.dim << '\n';
    json spectrum = json::array();
    for (const auto& e : sd.spaces) {
      text << "  eigenvalue " << rational_to_string(e.value) << ", rank " << e.proj.rank() << ": " << e.proj.to_string() << '\n';
      spectrum.push_back({{"value", tagged(e.value)}, {"rank", e.proj.rank()}, {"proj", matrix_to_json(e.proj.matrix())}});
    }
    QReal r = qreal_from_spectral(sd);
    if (!grid.empty()) {
      try {
        r = refine(r, parse_grid(grid));
      } catch (const GridError& e) {
        throw UsageError(e.what());
      }
    }
    json cuts = json::array();
    for (std::size_t k = 0; k < r.grid.size(); ++k) {
      text << "  E(" << rational_to_string(r.grid[k]) << ") = " << r.cuts[k].to_string() << '\n';
      cuts.push_back({{"at", tagged(r.grid[k])}, {"cut", matrix_to_json(r.cuts[k].matrix())}});
    }
    doc[n] = {{"dim", sd.dim}, {"spectrum", spectrum}, {"cuts", cuts}};
  }
  if (!name.empty() && !w.observables.count(name)) throw std::out_of_range("no observable named '" + name + "'");
  emit(o, doc, text.str());
  return ok;
}

int cmd_state(const Options& o, const std::string& name, const std::string& def) {
  Workspace w = load(o);
  if (!def.empty()) {
    if (name.empty()) throw UsageError("--def needs a state name");
    json states = w.doc.value("states", json::object());
    states[name] = parse_json_arg(def);
    w.doc["states"] = states;
    w = Workspace::from_json(w.doc);
    save(o, w);
  }
  json doc = json::object();
  std::ostringstream text;
  for (const auto& [n, psi] : w.states) {
    if (!name.empty() && n != name) continue;
    const char* kind = psi.is_exact() ? (psi.is_ray() ? "ray" : "exact") : "decimal";
    std::string norm;
    if (psi.is_exact()) {
      norm = tagged(psi.norm_squared_exact());
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "decimal %.12f", psi.norm_squared());
      norm = buf;
    }
    text << n << ": " << kind << " state of dimension " << psi.dim() << ", squared norm " << norm << '\n';
    doc[n] = {{"state", to_json(psi)}, {"norm_squared", norm}};
  }
  if (!name.empty() && !w.states.count(name)) throw std::out_of_range("no state named '" + name + "'");
  emit(o, doc, text.str());
  return ok;
}

// eval

std::string infer_lattice(Workspace& w, const std::vector<Formula>& formulas, const std::string& requested,
                          const std::string& fragment) {
  std::string owner = requested;
  auto agree = [&](const std::string& l, const std::string& what) {
    if (l.empty()) return;
    if (!owner.empty() && owner != l) throw UsageError(what + " belongs to lattice " + l + ", not " + owner);
    owner = l;
  };
  if (!fragment.empty()) {
    const std::string l = w.owner_of_fragment(fragment);
    if (l.empty()) throw UsageError("no fragment named '" + fragment + "'");
    agree(l, "fragment " + fragment);
  }
  for (const auto& f : formulas) {
    for (const auto& v : free_variables(f)) agree(w.owner_of_set(v), "set " + v);
  }
  if (owner.empty()) {
    if (w.lattices.size() != 1) throw UsageError("cannot tell which lattice to use; pass --lattice");
    owner = w.lattices.begin()->first;
  }
  return owner;
}

template <OrthoLattice L>
int eval_in(const Options& o, Universe<L>& u, const std::vector<FormulaLine>& formulas, const std::string& fragment,
            const std::vector<std::string>& lets) {
  Environment<L> env;
  for (const auto& [n, s] : u.sets) env.bind(n, s);
  for (const auto& let : lets) {
    const auto eq = let.find('=');
    if (eq == std::string::npos) throw UsageError("--let expects name=literal");
    try {
      env.bind(let.substr(0, eq), parse_qset_literal(u.lattice, let.substr(eq + 1), u.scope()));
    } catch (const LiteralError& e) {
      throw UsageError("--let " + let.substr(0, eq) + ": " + e.what());
    }
  }
  Session<L> session(u.lattice);
  if (!fragment.empty()) {
    const Fragment<L>& f = *u.fragments.at(fragment);
    session.attach(f);
    env.universe = &f;
  }
  Evaluator<L> ev(session);
  ev.set_trace(o.trace);
  json results = json::array();
  std::ostringstream text;
  for (const auto& fl : formulas) {
    ev.reset_notes();
    const auto v = ev.eval(fl.formula, env);
    json r = {{"formula", print(fl.formula)}, {"value", value_doc(u, v)}};
    if (formulas.size() > 1) {
      r["line"] = fl.line;
      text << "line " << fl.line << ": ";
    }
    text << u.lattice.describe(v) << '\n';
    json notes = json::array();
    if (ev.notes().truncated_universal) {
      const std::string note = "unbounded quantifier ranged over fragment " + fragment + " only (clause (4) truncated)";
      notes.push_back(note);
      text << "  note: " << note << '\n';
    }
    r["notes"] = notes;
    if (o.trace) {
      r["trace"] = ev.notes().trace;
      for (const auto& t : ev.notes().trace) text << "  " << t << '\n';
    }
    results.push_back(r);
  }
  emit(o, formulas.size() == 1 ? results[0] : json{{"lattice", u.name}, {"results", results}}, text.str());
  return ok;
}

int cmd_eval(const Options& o, const std::string& formula, const std::string& file, const std::string& lattice,
             const std::string& fragment, const std::vector<std::string>& lets) {
  Workspace w = load(o);
  std::vector<FormulaLine> formulas;
  if (!file.empty()) {
    formulas = parse_formula_file(read_text_file(file));
  } else if (!formula.empty()) {
    formulas.push_back({1, parse(formula)});
  } else {
    throw UsageError("eval needs a formula or --file");
  }
  std::vector<Formula> fs;
  for (const auto& fl : formulas) fs.push_back(fl.formula);
  const std::string owner = infer_lattice(w, fs, lattice, fragment);
  return std::visit([&](auto& u) { return eval_in(o, u, formulas, fragment, lets); }, w.lattice(owner));
}

// check

template <OrthoLattice L>
std::vector<typename L::Element> law_sample(const Universe<L>& u) {
  std::vector<typename L::Element> out;
  auto add = [&](const typename L::Element& x) {
    for (const auto& y : out) {
      if (u.lattice.equal(x, y)) return;
    }
    out.push_back(x);
  };
  if constexpr (L::kind == LatticeKind::boolean) {
    for (unsigned m = 0; m < u.lattice.size(); ++m) add(u.lattice.element(m));
  } else {
    add(u.lattice.bottom());
    add(u.lattice.top());
    for (const auto& [n, v] : u.values) {
      add(v);
      add(u.lattice.ortho(v));
    }
    // One round of pairwise meets and joins.
    const auto base = out;
    for (const auto& x : base) {
      for (const auto& y : base) {
        add(u.lattice.meet(x, y));
        add(u.lattice.join(x, y));
      }
    }
  }
  return out;
}

std::string pad(std::string s, std::size_t w) {
  s += ' ';
  if (s.size() < w) s.resize(w, ' ');
  return s;
}

template <OrthoLattice L>
int check_laws(const Universe<L>& u, json& report, std::ostringstream& text) {
  const auto sample = law_sample(u);
  const LawReport rep = verify_laws(u.lattice, sample);
  const bool distributivity_expected = L::kind == LatticeKind::boolean;
  text << "laws on " << u.name << " (" << spec_of(u.lattice).describe() << "), " << sample.size() << " elements\n";
  json laws = json::array();
  for (const auto& r : rep.laws) {
    const bool dist = r.law.rfind("distributive", 0) == 0;
    std::string status = r.holds ? "holds" : (dist && !distributivity_expected ? "fails (expected)" : "FAILS");
    text << "  " << pad(r.law, 20) << pad(std::to_string(r.checked), 10) << status;
    if (r.witness) text << "  witness: " << *r.witness;
    text << '\n';
    laws.push_back({{"law", r.law}, {"checked", r.checked}, {"holds", r.holds}, {"witness", r.witness ? json(*r.witness) : json()}});
  }
  const bool pass = rep.ortholattice_ok && rep.orthomodular_ok && (rep.distributive || !distributivity_expected);
  if (!rep.distributive && !distributivity_expected) {
    text << "distributivity violation: " << *rep.distributivity_witness << '\n';
  }
  report = {{"suite", "laws"},
            {"lattice", u.name},
            {"elements", sample.size()},
            {"laws", laws},
            {"distributive", rep.distributive},
            {"pass", pass}};
  return pass ? ok : check_failed;
}

template <OrthoLattice L>
int check_fragment(const std::string& suite, Universe<L>& u, const std::string& fragment, const std::vector<std::string>& schemas,
                   const std::vector<std::string>& claims, json& report, std::ostringstream& text) {
  const Fragment<L>& frag = *u.fragments.at(fragment);
  Session<L> session(u.lattice, frag);
  report = {{"suite", suite}, {"lattice", u.name}, {"fragment", fragment}, {"sets", frag.size()}};
  text << suite << " on fragment " << fragment << " (" << frag.size() << " sets over " << spec_of(u.lattice).describe() << ")\n";
  if (!session.dense()) throw UsageError("fragment " + fragment + " is too large for exhaustive checks");

  if (suite == "equality-axiom") {
    const auto found = find_equality_axiom_violation(session);
    const bool boolean = L::kind == LatticeKind::boolean;
    const bool pass = !(found && boolean);
    if (found) {
      text << "violation: " << found->describe(u.lattice) << '\n';
      text << (boolean ? "FAIL: a Boolean-valued universe must satisfy substitution\n"
                       : "substitution fails in the projection-valued universe (expected)\n");
      report["violation"] = {{"formula", found->formula},
                             {"u", qset_literal(u.lattice, *found->u)},
                             {"v", qset_literal(u.lattice, *found->v)},
                             {"w", qset_literal(u.lattice, *found->w)},
                             {"u_eq_v", value_doc(u, found->equal_uv)},
                             {"phi_u", value_doc(u, found->phi_u)},
                             {"phi_v", value_doc(u, found->phi_v)}};
    } else {
      text << "no violation in this fragment\n";
      report["violation"] = nullptr;
    }
    report["pass"] = pass;
    return pass ? ok : check_failed;
  }

  std::vector<Schema> selected;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const auto vars = free_variables(parse(claims[i]));
    if (vars.empty()) throw UsageError("a claim needs at least one free variable");
    selected.push_back({"claim-" + std::to_string(i + 1), claims[i], {vars.begin(), vars.end()}});
  }
  if (schemas.empty() && claims.empty()) {
    selected = catalog();
  } else {
    for (const auto& s : schemas) {
      if (s == control_schema().name) {
        selected.push_back(control_schema());
        continue;
      }
      try {
        selected.push_back(catalog_entry(s));
      } catch (const std::out_of_range& e) {
        throw UsageError(e.what());
      }
    }
  }
  const SuiteKind kind = suite == "scott-solovay" ? SuiteKind::scott_solovay : SuiteKind::transfer;
  if (kind == SuiteKind::scott_solovay && L::kind != LatticeKind::boolean) {
    text << "not applicable: the value-1 check needs a Boolean lattice\n";
    report["applicable"] = false;
    report["pass"] = true;
    return ok;
  }
  const auto summaries = run_suite(session, selected, kind);
  text << "  " << pad("schema", 26) << pad("instances", 14) << pad("below 1", 10) << "failures\n";
  json rows = json::array();
  bool pass = true;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    const bool control = !selected[i].theorem;
    text << "  " << pad(s.schema + (control ? " (control)" : ""), 26) << pad(std::to_string(s.instances), 14)
         << pad(std::to_string(s.below_one), 10) << s.failures << '\n';
    json failed = json::array();
    for (const auto& f : s.failed) {
      text << "    " << f.witness(u.lattice) << '\n';
      failed.push_back(f.witness(u.lattice));
    }
    if (s.failures) pass = false;
    rows.push_back({{"schema", s.schema},
                    {"theorem", !control},
                    {"instances", s.instances},
                    {"below_one", s.below_one},
                    {"failures", s.failures},
                    {"failed", failed}});
  }
  text << (pass ? "all instances pass\n" : "FAIL\n");
  report["schemas"] = rows;
  report["pass"] = pass;
  return pass ? ok : check_failed;
}

int cmd_check(const Options& o, const std::string& suite, const std::string& lattice, const std::string& fragment,
              const std::vector<std::string>& schemas, const std::vector<std::string>& claims,
              const std::string& report_path) {
  Workspace w = load(o);
  json report;
  std::ostringstream text;
  int code = ok;
  if (suite == "laws") {
    code = std::visit([&](auto& u) { return check_laws(u, report, text); }, w.pick_lattice(lattice));
  } else {
    if (fragment.empty()) throw UsageError(suite + " needs --fragment");
    const std::string owner = w.owner_of_fragment(fragment);
    if (owner.empty()) throw UsageError("no fragment named '" + fragment + "'");
    if (!lattice.empty() && lattice != owner) throw UsageError("fragment " + fragment + " belongs to lattice " + owner);
    code = std::visit([&](auto& u) { return check_fragment(suite, u, fragment, schemas, claims, report, text); }, w.lattice(owner));
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw DataError("cannot write " + report_path);
    out << report.dump(2) << '\n';
  }
  emit(o, report, text.str());
  return code;
}

// prob

json probability_doc(const Probability& p) {
  json d = {{"text", p.to_string()}};
  if (p.exact) d["exact"] = rational_to_string(*p.exact);
  return d;
}

int cmd_prob(const Options& o, const std::string& spec, const std::string& state, const std::string& lattice,
             bool show_projection) {
  Workspace w = load(o);
  auto psi_it = w.states.find(state);
  if (psi_it == w.states.end()) throw UsageError("no state named '" + state + "'");
  const StateVector& psi = psi_it->second;

  Projection truth;
  bool model_dependent = false;
  std::string kind;
  const auto eq = spec.find('=');
  auto trim = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  const std::string lhs = eq == std::string::npos ? "" : trim(spec.substr(0, eq));
  const std::string rhs = eq == std::string::npos ? "" : trim(spec.substr(eq + 1));
  if (w.observables.count(lhs) && w.observables.count(rhs)) {
    const auto& a = w.observables.at(lhs);
    const auto& b = w.observables.at(rhs);
    if (a.dim != b.dim) throw DataError("observables " + lhs + " and " + rhs + " have different dimensions");
    const RealTruth t = truth_eq(qreal_from_spectral(a), qreal_from_spectral(b));
    truth = t.value;
    model_dependent = t.model_dependent;
    kind = "observable equality";
  } else if (w.observables.count(lhs)) {
    mpq_class value;
    try {
      value = parse_rational(rhs);
    } catch (const std::invalid_argument& e) {
      throw UsageError("'" + rhs + "' is neither an observable nor a rational value");
    }
    truth = observational_atom(w.observables.at(lhs), value);
    kind = "observational proposition";
  } else {
    const Formula f = parse(spec);
    const std::string owner = infer_lattice(w, {f}, lattice, "");
    auto* u = std::get_if<Universe<ProjectionLattice>>(&w.lattice(owner));
    if (!u) throw UsageError("formula probabilities need a projection lattice");
    Environment<ProjectionLattice> env;
    for (const auto& [n, s] : u->sets) env.bind(n, s);
    truth = evaluate(u->lattice, f, env);
    kind = "formula";
  }
  if (truth.dim() != psi.dim()) {
    throw DataError("truth value acts on C^" + std::to_string(truth.dim()) + " but state " + state + " has dimension " +
                    std::to_string(psi.dim()));
  }
  const Probability p = born_probability(truth, psi);
  json doc = {{"spec", spec}, {"kind", kind}, {"state", state}, {"probability", probability_doc(p)}};
  std::ostringstream text;
  text << "probability: " << p.to_string() << '\n';
  if (show_projection) {
    text << "projection: " << truth.to_string() << '\n';
    doc["projection"] = matrix_to_json(truth.matrix());
  }
  if (model_dependent) {
    text << "note: the observables do not commute; the value depends on the chosen rendering of equality\n";
  }
  doc["model_dependent"] = model_dependent;
  emit(o, doc, text.str());
  return ok;
}

// enumerate

int cmd_enumerate(const Options& o, const std::string& lattice, const std::vector<std::string>& values, int rank,
                  std::size_t max_values, const std::string& name, const std::string& out_path) {
  Workspace w = load(o);
  json doc;
  std::ostringstream text;
  std::visit(
      [&](auto& u) {
        using L = std::decay_t<decltype(u.lattice)>;
        std::vector<typename L::Element> vals;
        json tokens = json::array();
        for (const auto& v : values) {
          json token = v;
          if (!v.empty() && std::isdigit(static_cast<unsigned char>(v[0])) && L::kind == LatticeKind::boolean) {
            token = std::stoul(v);
          }
          tokens.push_back(token);
          vals.push_back(resolve_value(u, token));
        }
        const std::string bound = stage_cardinality(vals.size(), rank);
        EnumerationLimits limits;
        limits.max_values = std::max(limits.max_values, max_values);
        const Fragment<L> frag = enumerate_fragment(u.lattice, vals, rank, limits);
        text << "V_" << rank << " over " << vals.size() << " values of " << u.name << ": " << bound << " sets\n";
        text << "fragment (with all lower ranks): " << frag.size() << " sets\n";
        doc = {{"lattice", u.name}, {"rank", rank}, {"values", tokens}, {"stage_cardinality", bound}, {"fragment_size", frag.size()}};
        if (!out_path.empty()) {
          std::ofstream out(out_path);
          if (!out) throw DataError("cannot write " + out_path);
          out << fragment_to_json(frag).dump(2) << '\n';
        }
        if (!name.empty() && !o.session.empty()) {
          json frags = w.doc.value("fragments", json::object());
          json e = {{"values", tokens}, {"rank", rank}};
          if (max_values > 0) e["max_values"] = limits.max_values;
          frags[name] = {{"lattice", u.name}, {"enumerate", e}};
          w.doc["fragments"] = frags;
          save(o, w);
        }
      },
      w.pick_lattice(lattice));
  emit(o, doc, text.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice-valued set theory at desk scale"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--session", o.session, "Session JSON file");
  app.add_flag("--trace", o.trace, "Print the evaluation trace with clause numbers");
  app.add_flag("--json", o.as_json, "Print JSON instead of text");

  std::string name, def, lattice, literal, grid, formula, file, fragment, suite, report, spec, state, out;
  std::vector<std::string> lets, schemas, claims, values;
  bool export_fragment = false, show_projection = false;
  int rank = 0;
  std::size_t max_values = 0;

  auto* c_lattice = app.add_subcommand("lattice", "Show or define lattices");
  c_lattice->add_option("name", name);
  c_lattice->add_option("--def", def, "Lattice JSON");

  auto* c_set = app.add_subcommand("set", "Show or define sets");
  c_set->add_option("name", name);
  c_set->add_option("--lattice", lattice);
  c_set->add_option("--literal", literal, "Set literal such as \"{ {}: P, check({{}}) }\"");
  c_set->add_flag("--export", export_fragment, "Also print the fragment generated by the set");

  auto* c_obs = app.add_subcommand("obs", "Show or define observables");
  c_obs->add_option("name", name);
  c_obs->add_option("--def", def, "Spectral JSON");
  c_obs->add_option("--grid", grid, "Extra cut points, comma separated");

  auto* c_state = app.add_subcommand("state", "Show or define states");
  c_state->add_option("name", name);
  c_state->add_option("--def", def, "State JSON");

  auto* c_eval = app.add_subcommand("eval", "Evaluate formulas");
  c_eval->add_option("formula", formula);
  c_eval->add_option("--file", file, "Formula file");
  c_eval->add_option("--lattice", lattice);
  c_eval->add_option("--fragment", fragment, "Fragment standing in for the universe");
  c_eval->add_option("--let", lets, "name=literal binding")->allow_extra_args(false);

  auto* c_check = app.add_subcommand("check", "Run a check suite");
  c_check->add_option("suite", suite)->required()->check(
      CLI::IsMember({"laws", "scott-solovay", "transfer", "equality-axiom"}));
  c_check->add_option("--lattice", lattice);
  c_check->add_option("--fragment", fragment);
  c_check->add_option("--schema", schemas, "Catalog schema (repeatable; control-equality for the control)")
      ->allow_extra_args(false);
  c_check->add_option("--claim", claims, "Also check this formula, its free variables ranging over the fragment")
      ->allow_extra_args(false);
  c_check->add_option("--report", report, "Write the JSON report here");

  auto* c_prob = app.add_subcommand("prob", "Born probability of A=B, A=a or a formula");
  c_prob->add_option("spec", spec)->required();
  c_prob->add_option("state", state)->required();
  c_prob->add_option("--lattice", lattice);
  c_prob->add_flag("--show-projection", show_projection);

  auto* c_enum = app.add_subcommand("enumerate", "Enumerate a full stage");
  c_enum->add_option("--lattice", lattice);
  c_enum->add_option("--values", values, "Truth values (masks or names)")->delimiter(',')->required();
  c_enum->add_option("--rank", rank)->required();
  c_enum->add_option("--max-values", max_values, "Raise the value-count guard");
  c_enum->add_option("--name", name, "Save as a session fragment");
  c_enum->add_option("--out", out, "Write the fragment JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*c_lattice) return cmd_lattice(o, name, def);
    if (*c_set) return cmd_set(o, name, lattice, literal, export_fragment);
    if (*c_obs) return cmd_obs(o, name, def, grid);
    if (*c_state) return cmd_state(o, name, def);
    if (*c_eval) return cmd_eval(o, formula, file, lattice, fragment, lets);
    if (*c_check) return cmd_check(o, suite, lattice, fragment, schemas, claims, report);
    if (*c_prob) return cmd_prob(o, spec, state, lattice, show_projection);
    if (*c_enum) return cmd_enumerate(o, lattice, values, rank, max_values, name, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return usage;
  } catch (const UnboundVariable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const LiteralError& e) {
    std::cerr << "literal error: " << e.what() << '\n';
    return usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const MissingFragment& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const SizeGuardExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return bad_data;
  } catch (const NormalizationError& e) {
    std::cerr << "invalid state: " << e.what() << '\n';
    return bad_data;
  } catch (const DataError& e) {
    std::cerr << "invalid data: " << e.what() << '\n';
    return bad_data;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid data: " << e.what() << '\n';
    return bad_data;
  }
  return usage;
}
