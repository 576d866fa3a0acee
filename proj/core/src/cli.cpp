#include "vna/cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vna/cep.hpp"
#include "vna/errors.hpp"
#include "vna/evaluate.hpp"
#include "vna/microstates.hpp"
#include "vna/parser.hpp"
#include "vna/presentation.hpp"

namespace vna {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dyadic entry_to_dyadic(const json& j, const char* what) {
  if (j.is_number_integer()) return Dyadic(j.get<long long>());
  if (j.is_number_float()) return Dyadic::from_double(j.get<double>());
  if (j.is_string()) {
    auto d = try_parse_dyadic(j.get<std::string>());
    if (d) return *d;
  }
  throw PreconditionError(std::string(what) + ": expected integer, float, or \"m/2^e\"");
}

AlgElement element_from_json(const TracialAlgebra& a, const json& j) {
  if (!j.is_array() || j.size() != a.block_count())
    throw PreconditionError("element: expected one array per block");
  std::vector<Eigen::MatrixXcd> blocks;
  for (std::size_t b = 0; b < a.block_count(); ++b) {
    int n = a.blocks()[b].dim;
    const json& rows = j[b];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      throw PreconditionError("element: bad row count in block");
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
        throw PreconditionError("element: bad column count in block");
      for (int c = 0; c < n; ++c) {
        const json& e = rows[r][c];
        if (e.is_object()) {
          m(r, c) = {entry_to_dyadic(e.at("re"), "re").to_double(),
                     entry_to_dyadic(e.at("im"), "im").to_double()};
        } else {
          m(r, c) = {entry_to_dyadic(e, "entry").to_double(), 0.0};
        }
      }
    }
    blocks.push_back(std::move(m));
  }
  return AlgElement(std::move(blocks));
}

std::vector<AlgElement> tuple_from_json(const TracialAlgebra& a, const std::string& text) {
  json j = json::parse(text, nullptr, true);
  if (!j.is_array() || j.empty())
    throw PreconditionError("tuple: expected a nonempty JSON array of elements");
  std::vector<AlgElement> out;
  for (const auto& e : j) out.push_back(element_from_json(a, e));
  return out;
}

Presentation presentation_from_spec(const std::string& spec) {
  if (spec.rfind("demo:", 0) == 0) {
    // demo:<algebra>:<count>:<seed>[:<arity>]
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 4 || parts.size() > 5)
      throw PreconditionError("presentation demo spec: demo:<algebra>:<count>:<seed>[:<arity>]");
    TracialAlgebra a = algebra_from_spec(parts[1]);
    int count = std::stoi(parts[2]);
    std::uint64_t seed = std::stoull(parts[3]);
    int arity = parts.size() == 5 ? std::stoi(parts[4]) : 1;
    if (count < 1) throw PreconditionError("presentation demo spec: count must be >= 1");
    std::vector<AlgElement> gens;
    gens.push_back(AlgElement::identity(a));
    for (int i = 1; i < count; ++i) gens.push_back(random_unit_ball(a, seed + i));
    return Presentation::finite(std::move(a), std::move(gens), arity);
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw PreconditionError("cannot open presentation code file: " + spec);
  GoedelCode code((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(code);
}

json interval_json(const DyadicInterval& iv) {
  return {{"lo", iv.lo().str()}, {"hi", iv.hi().str()}, {"width", iv.width().str()}};
}

json work_json(const WorkCounters& w) {
  return {{"point_evals", w.point_evals},
          {"boxes", w.boxes},
          {"heuristic_steps", w.heuristic_steps}};
}

struct ReportBuilder {
  std::ostringstream text;
  json obj = json::object();

  void config_line(const std::string& key, const std::string& val) {
    text << "# " << key << ": " << val << "\n";
    obj["config"][key] = val;
  }
  void line(const std::string& s) { text << s << "\n"; }
};

const char* class_name(SentenceClass c) {
  switch (c) {
    case SentenceClass::QuantifierFree: return "quantifier-free";
    case SentenceClass::Universal: return "universal";
    case SentenceClass::Existential: return "existential";
    case SentenceClass::ExistsForall: return "exists-forall";
    case SentenceClass::Other: return "other";
  }
  return "?";
}

}  // namespace

TracialAlgebra algebra_from_spec(const std::string& text) {
  if (text.size() >= 2 && text[0] == 'M') {
    bool digits = true;
    for (std::size_t i = 1; i < text.size(); ++i)
      digits = digits && std::isdigit(static_cast<unsigned char>(text[i]));
    if (digits) return TracialAlgebra::matrix(std::stoi(text.substr(1)));
  }
  return parse_algebra(text);
}

RunReport dispatch(const RunConfig& cfg) {
  RunReport rep;
  ReportBuilder rb;
  try {
    if (cfg.eps.sign() <= 0) throw PreconditionError("eps must be positive");
    for (const auto& t : cfg.grid) {
      if (t.sign() < 0 || t > Dyadic(1))
        throw PreconditionError("grid points must lie in [0,1]");
    }

    EvalOptions opts;
    opts.seed = cfg.seed;
    opts.heuristic_budget = cfg.budget;

    rb.obj["command"] = cfg.command;
    rb.config_line("command", cfg.command);
    if (!cfg.formula.empty()) rb.config_line("formula", cfg.formula);
    if (!cfg.algebra.empty()) rb.config_line("algebra", cfg.algebra);
    if (!cfg.algebra_b.empty()) rb.config_line("algebra-b", cfg.algebra_b);
    rb.config_line("eps", cfg.eps.str());
    rb.config_line("seed", std::to_string(cfg.seed));
    rb.config_line("budget", std::to_string(cfg.budget));

    if (cfg.command == "eval") {
      TracialAlgebra a = algebra_from_spec(cfg.algebra);
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      SentenceClass cls = classify(*f);
      CertifiedValue cv = optimize(a, f, opts);
      rb.line(std::string("class: ") + class_name(cls));
      rb.line("interval: " + cv.interval.str());
      rb.line("one-sided: " + std::string(cls == SentenceClass::Universal ? "lower" : "upper") +
              " end is the heuristic witness value");
      rb.line("heuristic-steps: " + std::to_string(cv.work.heuristic_steps));
      rb.obj["result"] = {{"class", class_name(cls)},
                          {"interval", interval_json(cv.interval)},
                          {"work", work_json(cv.work)}};
    } else if (cfg.command == "certify") {
      TracialAlgebra a = algebra_from_spec(cfg.algebra);
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      CertifiedValue cv = certify(a, f, cfg.eps, opts);
      rb.line("interval: " + cv.interval.str());
      rb.line("width: " + cv.interval.width().str());
      rb.line("boxes: " + std::to_string(cv.work.boxes));
      rb.line("point-evals: " + std::to_string(cv.work.point_evals));
      rb.obj["result"] = {{"interval", interval_json(cv.interval)},
                          {"work", work_json(cv.work)}};
    } else if (cfg.command == "microstates") {
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      if (!cfg.algebra.empty()) {
        TracialAlgebra a = algebra_from_spec(cfg.algebra);
        CompareReport cr = compare_universal(f, a, cfg.k_max, cfg.eps, opts);
        rb.line(cr.to_text());
        json levels = json::array();
        for (const auto& lv : cr.chain.levels)
          levels.push_back({{"k", lv.k},
                            {"interval", interval_json(lv.value.interval)},
                            {"tag", lv.value.certified ? "certified" : "heuristic"}});
        rb.obj["result"] = {{"algebra_interval", interval_json(cr.lhs.interval)},
                            {"levels", levels},
                            {"verdict", verdict_name(cr.verdict)}};
      } else {
        MicrostateReport mr = microstate_sequence(f, cfg.k_max, cfg.eps, opts);
        rb.line(mr.to_text());
        json levels = json::array();
        for (const auto& lv : mr.levels)
          levels.push_back({{"k", lv.k},
                            {"interval", interval_json(lv.value.interval)},
                            {"tag", lv.value.certified ? "certified" : "heuristic"}});
        rb.obj["result"] = {{"levels", levels},
                            {"monotone", mr.monotone_consistent},
                            {"chain_bound", mr.chain_bound.str()},
                            {"bound_is_lower", mr.bound_is_lower}};
      }
    } else if (cfg.command == "interpolate") {
      TracialAlgebra a = algebra_from_spec(cfg.algebra);
      TracialAlgebra b = algebra_from_spec(cfg.algebra_b);
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      std::vector<Dyadic> grid = cfg.grid;
      if (grid.empty()) {
        for (int j = 0; j <= 4; ++j) grid.push_back(Dyadic(j).div_pow2(2));
      }
      auto scan = interpolation_scan(f, b, a, grid, cfg.eps, opts);
      rb.line(scan_to_text(scan));
      json records = json::array();
      for (const auto& [t, cv] : scan)
        records.push_back({{"t", t.str()}, {"interval", interval_json(cv.interval)}});
      rb.obj["result"]["scan"] = records;
      if (cfg.count > 0) {
        DistinctValues dv = distinct_values_demo(f, b, a, cfg.count, cfg.eps, opts);
        rb.line("distinct-requested: " + std::to_string(dv.requested));
        rb.line("distinct-achieved: " + std::to_string(dv.points.size()) +
                (dv.achieved ? "" : " (below request)"));
        json pts = json::array();
        for (const auto& [t, iv] : dv.points) {
          rb.line("distinct t=" + t.str() + " interval=" + iv.str());
          pts.push_back({{"t", t.str()}, {"interval", interval_json(iv)}});
        }
        rb.obj["result"]["distinct"] = {{"requested", dv.requested},
                                        {"achieved", dv.achieved},
                                        {"points", pts}};
      }
    } else if (cfg.command == "separation") {
      TracialAlgebra a = algebra_from_spec(cfg.algebra);
      std::vector<AlgElement> tuple = tuple_from_json(a, cfg.tuple_json);
      SeparationSentence sep = build_separation(cfg.degree, a, tuple);
      rb.line("monomials: " + std::to_string(sep.monomials.size()));
      rb.line("sentence: " + format_formula(*sep.sentence));
      CertifiedValue self = certify(a, sep.sentence, cfg.eps, opts);
      rb.line("self-interval: " + self.interval.str());
      rb.obj["result"] = {{"monomials", sep.monomials},
                          {"sentence", format_formula(*sep.sentence)},
                          {"self_interval", interval_json(self.interval)}};
      if (!cfg.algebra_b.empty()) {
        TracialAlgebra b = algebra_from_spec(cfg.algebra_b);
        CertifiedValue other = certify(b, sep.sentence, cfg.eps, opts);
        rb.line("target-interval: " + other.interval.str());
        rb.obj["result"]["target_interval"] = interval_json(other.interval);
      }
    } else if (cfg.command == "witness") {
      Presentation p = presentation_from_spec(cfg.presentation);
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      WitnessResult wr = good_witness(encode(p), f, cfg.eps, opts, cfg.steps ? cfg.steps : 4096);
      rb.line("reference: " + wr.reference.str());
      rb.line("good-index: " + std::to_string(wr.index));
      rb.line("achieved: " + wr.achieved.str());
      rb.obj["result"] = {{"reference", interval_json(wr.reference)},
                          {"good_index", wr.index},
                          {"achieved", interval_json(wr.achieved)}};
    } else if (cfg.command == "enumerate-ea") {
      Presentation p = presentation_from_spec(cfg.presentation);
      FormulaPtr f = parse_formula(cfg.formula, {.require_sentence = true});
      EaRun run = upper_enumerate_ea(p, f, cfg.eps, cfg.steps, opts);
      rb.line(run.to_text());
      json recs = json::array();
      for (const auto& b : run.bounds)
        recs.push_back({{"step", b.step}, {"upper", b.upper.str()}});
      rb.obj["result"]["bounds"] = recs;
    } else {
      rep.status = kExitParse;
      rep.text = "unknown command: " + cfg.command +
                 "\nexpected one of: eval certify microstates interpolate separation "
                 "witness enumerate-ea\n";
      return rep;
    }
  } catch (const ParseError& e) {
    rep.status = kExitParse;
    rep.text = std::string("parse error: ") + e.what() + " at bytes [" +
               std::to_string(e.span().start) + ", " + std::to_string(e.span().end) + ")\n";
    return rep;
  } catch (const ResourceLimitError& e) {
    rep.status = kExitResource;
    rep.text = std::string("resource limit: ") + e.what() + "\n";
    return rep;
  } catch (const PreconditionError& e) {
    rep.status = kExitPrecondition;
    rep.text = std::string("precondition: ") + e.what() + "\n";
    return rep;
  }

  rep.status = kExitOk;
  rep.text = cfg.json_output ? rb.obj.dump(2) + "\n" : rb.text.str();
  return rep;
}

}  // namespace vna
