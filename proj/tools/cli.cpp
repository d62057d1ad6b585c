#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "fsmx/automata_io.hpp"
#include "fsmx/bench.hpp"
#include "fsmx/distances.hpp"
#include "fsmx/error.hpp"
#include "fsmx/extraction.hpp"
#include "fsmx/oracle_learning.hpp"
#include "fsmx/rnn_io.hpp"
#include "fsmx/sat.hpp"
#include "fsmx/tomita.hpp"
#include "fsmx/training.hpp"

namespace fsmx::cli {

namespace fs = std::filesystem;

namespace {

struct Global {
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "json";
  bool no_timing = false;
};

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double real(const std::string& text) { return to_double(parse_rational(text)); }

Alphabet parse_alphabet(const std::string& list) {
  if (list.empty()) return Alphabet::binary();
  std::vector<std::string> symbols;
  std::stringstream ss(list);
  for (std::string s; std::getline(ss, s, ',');) symbols.push_back(s);
  return Alphabet(std::move(symbols));
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return in;
}

LabeledSample load_dataset(const std::string& path, const Alphabet& sigma) {
  auto in = open(path);
  return read_dataset(in, sigma);
}

SatFormula load_cnf(const std::string& path) {
  auto in = open(path);
  return read_dimacs(in);
}

bool is_rnn(const Json& j) { return j.contains("kind"); }

Dfa target_dfa(int grammar, const std::string& dfa_path) {
  if (!dfa_path.empty()) return dfa_from_json(read_json_file(dfa_path));
  if (grammar == 0) throw UsageError("a target is needed: --grammar or --dfa");
  return tomita_dfa(grammar);
}

// Writes `text` to <out>/<name> when --out is set, else to stdout.
void emit(const Global& g, std::ostream& out, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  fs::create_directories(g.out);
  std::ofstream f(fs::path(g.out) / name, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + (fs::path(g.out) / name).string());
  f << text;
}

void require_json(const Global& g, const std::string& cmd) {
  if (g.format != "json") throw UsageError("--format " + g.format + " is not supported by " + cmd);
}

std::string csv_pairs(const Json& j) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : j.items()) s += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
  return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-state extraction, weighted-automata distances and oracle learning", "fsmx"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory (stdout when omitted)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_flag("--no-timing", g.no_timing, "Report wall-clock fields as 0");

  std::function<void()> action;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a labeled dataset for a Tomita grammar or a DFA");
  int gen_grammar = 0;
  std::string gen_dfa, gen_strategy = "uniform";
  DatasetSpec ds;
  gen->add_option("--grammar", gen_grammar, "Tomita grammar id")->check(CLI::Range(1, 7));
  gen->add_option("--dfa", gen_dfa, "Target DFA JSON");
  gen->add_option("--strategy", gen_strategy)->check(CLI::IsMember({"uniform", "uniform-upsampled", "prefix-quota"}));
  gen->add_option("--max-len", ds.max_len)->capture_default_str();
  gen->add_option("--size", ds.size)->capture_default_str();
  gen->add_option("--positive-ratio", ds.positive_ratio)->capture_default_str();
  gen->add_option("--quota", ds.quota)->capture_default_str();
  gen->callback([&] {
    action = [&] {
      const Dfa target = target_dfa(gen_grammar, gen_dfa);
      ds.strategy = parse_strategy(gen_strategy);
      ds.seed = g.seed;
      const LabeledSample sample =
          gen_dataset(target.alphabet(), [&](const Word& w) { return target.run(w); }, ds, &target);
      std::ostringstream s;
      if (g.format == "csv") {
        s << "label,word\n";
        for (const auto& it : sample.items) s << (it.label ? 1 : 0) << ',' << target.alphabet().format(it.word) << '\n';
      } else {
        write_dataset(s, sample);
      }
      emit(g, out, g.format == "csv" ? "data.csv" : "data.tsv", s.str());
    };
  });

  // train
  auto* tr = app.add_subcommand("train", "Train a recognizer RNN on a dataset");
  std::string tr_data, tr_test, tr_cell = "first-order", tr_act = "tanh", tr_alphabet;
  std::size_t tr_dim = 20;
  TrainConfig tc;
  bool tr_no_early = false;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--test", tr_test);
  tr->add_option("--alphabet", tr_alphabet, "Comma-separated symbols (default 0,1)");
  tr->add_option("--cell", tr_cell)->check(CLI::IsMember({"first-order", "second-order", "lstm", "gru"}));
  tr->add_option("--activation", tr_act)->check(CLI::IsMember({"sigmoid", "tanh", "relu"}));
  tr->add_option("--dim", tr_dim)->capture_default_str();
  tr->add_option("--epochs", tc.epochs)->capture_default_str();
  tr->add_option("--lr", tc.learning_rate)->capture_default_str();
  tr->add_option("--batch", tc.batch_size)->capture_default_str();
  tr->add_option("--restarts", tc.max_restarts)->capture_default_str();
  tr->add_option("--train-gate", tc.train_gate)->capture_default_str();
  tr->add_option("--test-gate", tc.test_gate)->capture_default_str();
  tr->add_flag("--no-early-stop", tr_no_early);
  tr->callback([&] {
    action = [&] {
      require_json(g, "train");
      const Alphabet sigma = parse_alphabet(tr_alphabet);
      const LabeledSample data = load_dataset(tr_data, sigma);
      const LabeledSample test = tr_test.empty() ? LabeledSample{sigma, {}, {}} : load_dataset(tr_test, sigma);
      RnnModel init(parse_cell_kind(tr_cell), parse_activation(tr_act), tr_dim, sigma, Head::Recognizer);
      randomize(init, tc.init_std, g.seed);
      tc.seed = g.seed;
      tc.early_stop = !tr_no_early;
      const TrainedModel t = train(init, data, test, tc);
      Json report{{"train_accuracy", t.train_accuracy},
                  {"test_accuracy", t.test_accuracy},
                  {"restarts", t.restarts},
                  {"gate_passed", t.gate_passed},
                  {"epochs", t.history.size()}};
      if (g.out.empty()) {
        out << dump(Json{{"report", report}, {"model", to_json(t.model)}});
      } else {
        emit(g, out, "rnn.json", dump(to_json(t.model)));
        out << dump(report);
      }
    };
  });

  // extract
  auto* ex = app.add_subcommand("extract", "Extract a DFA from a recognizer RNN or a DFA oracle");
  std::string ex_model, ex_method = "lstar";
  ExtractionConfig ec;
  ex->add_option("model", ex_model, "rnn.json or dfa.json")->required();
  ex->add_option("--method", ex_method)->check(CLI::IsMember({"quantization", "clustering", "lstar"}));
  ex->add_option("--depth", ec.max_depth)->capture_default_str();
  ex->add_option("--resolution", ec.resolution)->capture_default_str();
  ex->add_option("--cell-cap", ec.cell_cap)->capture_default_str();
  ex->add_option("--clusters", ec.clusters)->capture_default_str();
  ex->add_option("--budget", ec.budget)->capture_default_str();
  ex->add_option("--granularity", ec.granularity)->capture_default_str();
  ex->add_option("--refinements", ec.refinement_budget)->capture_default_str();
  ex->add_option("--max-queries", ec.max_membership_queries)->capture_default_str();
  ex->callback([&] {
    action = [&] {
      require_json(g, "extract");
      const Json j = read_json_file(ex_model);
      ec.method = parse_method(ex_method);
      ec.seed = g.seed;
      std::unique_ptr<StateMachineOracle> oracle;
      if (is_rnn(j))
        oracle = std::make_unique<RnnOracle>(rnn_from_json(j));
      else
        oracle = std::make_unique<DfaOracle>(dfa_from_json(j));
      emit(g, out, "extraction.json", dump(to_json(extract(*oracle, ec), !g.no_timing)));
    };
  });

  // minimize
  auto* mn = app.add_subcommand("minimize", "Minimize a DFA");
  std::string mn_in;
  mn->add_option("dfa", mn_in)->required();
  mn->callback([&] {
    action = [&] {
      require_json(g, "minimize");
      emit(g, out, "dfa.json", dump(to_json(minimize(dfa_from_json(read_json_file(mn_in))))));
    };
  });

  // equiv
  auto* eq = app.add_subcommand("equiv", "Decide DFA equivalence");
  std::string eq_a, eq_b;
  eq->add_option("a", eq_a)->required();
  eq->add_option("b", eq_b)->required();
  eq->callback([&] {
    action = [&] {
      const Dfa a = dfa_from_json(read_json_file(eq_a));
      const Dfa b = dfa_from_json(read_json_file(eq_b));
      const auto cex = find_counterexample(a, b);
      if (!cex)
        out << "equivalent\n";
      else
        out << "not equivalent\ncounterexample: \"" << a.alphabet().format(*cex) << "\"\n";
    };
  });

  // distance
  auto* di = app.add_subcommand("distance", "Compare two weighted languages (pfa.json or LM rnn.json)");
  std::string di_a, di_b, di_mode = "sup", di_c = "0";
  std::size_t di_len = 10, di_cap = 1000000;
  di->add_option("a", di_a)->required();
  di->add_option("b", di_b)->required();
  di->add_option("--mode", di_mode)->check(CLI::IsMember({"sup", "tchebychev", "eq"}))->capture_default_str();
  di->add_option("--max-len", di_len)->capture_default_str();
  di->add_option("--c", di_c, "Threshold for tchebychev (p/q or decimal)");
  di->add_option("--cap", di_cap)->capture_default_str();
  di->callback([&] {
    action = [&] {
      require_json(g, "distance");
      auto load = [](const std::string& path) -> std::unique_ptr<WeightedLanguage> {
        const Json j = read_json_file(path);
        if (is_rnn(j)) return std::make_unique<RnnLmLanguage>(rnn_from_json(j));
        return std::make_unique<WfaLanguage>(pfa_from_json(j));
      };
      const auto a = load(di_a);
      const auto b = load(di_b);
      const Alphabet& sigma = a->alphabet();
      Json r{{"mode", di_mode}};
      if (di_mode == "sup") {
        const SupDistance d = dist_inf_finite(*a, *b, di_len);
        r["max_len"] = di_len;
        r["value"] = d.value;
        r["witness"] = sigma.format(d.witness);
      } else if (di_mode == "eq") {
        const auto w = eq_finite(*a, *b, di_len);
        r["max_len"] = di_len;
        r["equal"] = !w;
        r["counterexample"] = w ? Json(sigma.format(*w)) : Json(nullptr);
      } else {
        const EnumerationResult e = tchebychev_enumerate(*a, *b, real(di_c), di_cap);
        r["c"] = di_c;
        r["verdict"] = to_string(e.verdict);
        r["witness"] = e.witness ? Json(sigma.format(*e.witness)) : Json(nullptr);
        r["strings_enumerated"] = e.strings_enumerated;
        r["mass_a"] = e.mass_a;
        r["mass_b"] = e.mass_b;
      }
      emit(g, out, "distance.json", dump(r));
    };
  });

  // reduce-sat
  auto* rs = app.add_subcommand("reduce-sat", "Build the PFA and RNN-LM of a 3-CNF formula");
  std::string rs_cnf, rs_eps, rs_s;
  rs->add_option("cnf", rs_cnf)->required();
  rs->add_option("--eps", rs_eps, "epsilon as p/q")->required();
  rs->add_option("--s", rs_s, "slack as p/q (default k - 1/2)");
  rs->callback([&] {
    action = [&] {
      require_json(g, "reduce-sat");
      const ReductionBundle b = make_bundle(load_cnf(rs_cnf), parse_rational(rs_eps),
                                            rs_s.empty() ? std::nullopt : std::optional(parse_rational(rs_s)));
      const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
      write_bundle(dir, b);
      out << "wrote " << (dir / "pfa.json").string() << ", " << (dir / "rnn.json").string() << ", "
          << (dir / "meta.json").string() << "\n";
    };
  });

  // decide-sat
  auto* dsat = app.add_subcommand("decide-sat", "Decide satisfiability through the PFA/RNN-LM distance");
  std::string ds_cnf, ds_eps, ds_s;
  bool ds_verbose = false;
  dsat->add_option("cnf", ds_cnf)->required();
  dsat->add_option("--eps", ds_eps, "epsilon as p/q")->required();
  dsat->add_option("--s", ds_s, "slack as p/q (default k - 1/2)");
  dsat->add_flag("--verbose", ds_verbose, "Print the distance, threshold and witness as JSON");
  dsat->callback([&] {
    action = [&] {
      const SatFormula f = load_cnf(ds_cnf);
      const SatDecision d =
          decide_sat(f, parse_rational(ds_eps), ds_s.empty() ? std::nullopt : std::optional(parse_rational(ds_s)));
      out << (d.satisfiable ? "SAT" : "UNSAT") << "\n";
      if (ds_verbose)
        out << dump(Json{{"d_inf", to_string(d.d_inf)},
                         {"c_eps", to_string(d.c_eps)},
                         {"witness", Alphabet::binary().format(d.witness)}});
    };
  });

  // learn-srm
  auto* srm = app.add_subcommand("learn-srm", "Structural risk minimization over DFA sizes");
  std::string srm_data, srm_alphabet, srm_C = "1", srm_delta = "1/20", srm_eps = "1/10";
  std::size_t srm_cap = 4, srm_support = 0;
  int srm_grammar = 0;
  std::string srm_dfa;
  srm->add_option("--data", srm_data)->required();
  srm->add_option("--alphabet", srm_alphabet);
  srm->add_option("--C", srm_C)->capture_default_str();
  srm->add_option("--delta", srm_delta)->capture_default_str();
  srm->add_option("--eps", srm_eps)->capture_default_str();
  srm->add_option("--size-cap", srm_cap)->capture_default_str();
  srm->add_option("--grammar", srm_grammar, "Target for L_P under the uniform law on the support")
      ->check(CLI::Range(1, 7));
  srm->add_option("--dfa", srm_dfa, "Target DFA for L_P");
  srm->add_option("--support", srm_support, "Max length of the uniform support used for L_P");
  srm->callback([&] {
    action = [&] {
      require_json(g, "learn-srm");
      const LabeledSample sample = load_dataset(srm_data, parse_alphabet(srm_alphabet));
      LearnerConfig cfg{real(srm_C), real(srm_delta), real(srm_eps), srm_cap, g.seed};
      check_config(cfg);
      const SrmResult r = learn_srm(sample, cfg);
      LearnerReport rep;
      rep.method = "srm";
      rep.config = cfg;
      rep.m = sample.size();
      rep.dfa = r.dfa;
      rep.empirical_risk = r.empirical_risk;
      const std::size_t k = sample.alphabet.size();
      rep.bounds = Json{{"penalty", r.penalty},
                        {"objective", r.objective},
                        {"generalization", generalization_bound(sample.size(), r.dfa.size(), cfg.delta, k, cfg.C, true)},
                        {"sample_size", sample_size_bound(cfg.epsilon, cfg.delta, k, cfg.C, 1.0)}};
      if (srm_grammar != 0 || !srm_dfa.empty()) {
        if (srm_support == 0) throw UsageError("--support is needed with a target");
        const Dfa target = target_dfa(srm_grammar, srm_dfa);
        const auto lm = FiniteSupportLm::uniform(target.alphabet(), srm_support);
        rep.true_risk = true_risk(r.dfa, lm, [&](const Word& w) { return target.run(w); });
      }
      emit(g, out, "report.json", dump(to_json(rep)));
    };
  });

  // learn-mps
  auto* mps = app.add_subcommand("learn-mps", "Learn from the most probable strings of a reference LM");
  std::string mps_pfa, mps_dfa;
  int mps_grammar = 0;
  std::size_t mps_uniform = 0, mps_n = 0;
  mps->add_option("--pfa", mps_pfa, "Deterministic PFA as the reference LM");
  mps->add_option("--uniform", mps_uniform, "Uniform reference LM over words up to this length");
  mps->add_option("--grammar", mps_grammar, "Membership oracle: Tomita grammar")->check(CLI::Range(1, 7));
  mps->add_option("--dfa", mps_dfa, "Membership oracle: DFA JSON");
  mps->add_option("--n", mps_n, "Number of most probable strings")->required();
  mps->callback([&] {
    action = [&] {
      require_json(g, "learn-mps");
      if (mps_pfa.empty() == (mps_uniform == 0)) throw UsageError("give exactly one of --pfa and --uniform");
      const Dfa target = target_dfa(mps_grammar, mps_dfa);
      const Labeler member = [&](const Word& w) { return target.run(w); };
      std::unique_ptr<ReferenceLm> lm;
      if (!mps_pfa.empty())
        lm = std::make_unique<DpfaLm>(pfa_from_json(read_json_file(mps_pfa)));
      else
        lm = std::make_unique<FiniteSupportLm>(FiniteSupportLm::uniform(target.alphabet(), mps_uniform));
      const MpsResult r = learn_mps(*lm, member, mps_n);
      LearnerReport rep;
      rep.method = "mps";
      rep.config.seed = g.seed;
      rep.m = mps_n;
      rep.dfa = r.dfa;
      rep.covered_mass = r.covered_mass;
      rep.bounds = Json{{"risk_upper", 1.0 - r.covered_mass}};
      if (lm->support()) rep.true_risk = true_risk(r.dfa, *lm, member);
      emit(g, out, "report.json", dump(to_json(rep)));
    };
  });

  // bench
  auto* be = app.add_subcommand("bench", "Run the extraction benchmark");
  std::string be_preset = "desk";
  std::vector<int> be_grammars;
  std::vector<std::size_t> be_dims;
  std::vector<std::string> be_cells;
  std::size_t be_runs = 0, be_threads = 0;
  bool be_quiet = false;
  be->add_option("--preset", be_preset)->check(CLI::IsMember({"desk", "paper"}))->capture_default_str();
  be->add_option("--grammars", be_grammars)->check(CLI::Range(1, 7));
  be->add_option("--dims", be_dims);
  be->add_option("--cells", be_cells);
  be->add_option("--runs", be_runs);
  be->add_option("--threads", be_threads, "Worker threads (default FSMX_THREADS or all cores)");
  be->add_flag("--quiet", be_quiet);
  be->callback([&] {
    action = [&] {
      ExperimentSpec spec = be_preset == "paper" ? paper_spec() : desk_spec();
      spec.seed = g.seed;
      if (!be_grammars.empty()) spec.grammars = be_grammars;
      if (!be_dims.empty()) spec.dims = be_dims;
      if (!be_cells.empty()) {
        spec.cells.clear();
        for (const auto& c : be_cells) spec.cells.push_back(parse_cell_class(c));
      }
      if (be_runs) spec.runs = be_runs;
      const auto records = run_benchmark(spec, be_threads, [&](const ExperimentRecord& r) {
        if (!be_quiet)
          err << "G" << r.grammar << " " << r.cell << " d=" << r.dim << " run " << r.run << " "
              << to_string(r.method) << (r.aborted ? " aborted" : r.success ? " ok" : " fail") << "\n";
      });
      const auto rows = aggregate(records);
      const bool timing = !g.no_timing;
      std::ostringstream rec, agg, rt, sc;
      write_records_csv(rec, records, timing);
      write_aggregate_csv(agg, rows, timing);
      write_table_tsv(rt, rows, "runtime", timing);
      write_table_tsv(sc, rows, "success", timing);
      const OrderingReport ord = check_orderings(rows);
      if (g.out.empty()) {
        out << (g.format == "csv" ? rec.str() : agg.str());
      } else {
        emit(g, out, "records.csv", rec.str());
        emit(g, out, "aggregate.csv", agg.str());
        emit(g, out, "runtime.tsv", rt.str());
        emit(g, out, "success.tsv", sc.str());
        if (g.format == "json") out << agg.str();
      }
      if (!g.no_timing) {
        out << "runtime ordering violations: " << ord.runtime_violations << "\n";
        for (const auto& d : ord.details)
          if (d.find("runtime") != std::string::npos) out << "  " << d << "\n";
      }
      out << "success ordering violations: " << ord.success_violations << "\n";
      for (const auto& d : ord.details)
        if (d.find("success") != std::string::npos) out << "  " << d << "\n";
    };
  });

  // bounds
  auto* bo = app.add_subcommand("bounds", "Sample-size and generalization bounds; C calibration");
  std::string bo_eps = "1/10", bo_delta = "1/20", bo_C = "1", bo_c = "1";
  std::size_t bo_k = 2, bo_m = 0, bo_n = 0;
  bool bo_weighted = false, bo_calibrate = false;
  std::vector<double> bo_grid{0.05, 0.1, 0.2, 0.5, 1.0};
  bo->add_option("--eps", bo_eps)->capture_default_str();
  bo->add_option("--delta", bo_delta)->capture_default_str();
  bo->add_option("--C", bo_C)->capture_default_str();
  bo->add_option("--c", bo_c, "Complexity constant c of the target")->capture_default_str();
  bo->add_option("--k", bo_k, "Alphabet size")->capture_default_str();
  bo->add_option("--m", bo_m, "Sample size for the generalization bound");
  bo->add_option("--n", bo_n, "DFA size for the generalization bound");
  bo->add_flag("--weighted", bo_weighted, "Split delta over sizes as delta 2^-n");
  bo->add_flag("--calibrate", bo_calibrate, "Calibrate C on noisy Tomita tasks");
  bo->add_option("--grid", bo_grid, "Candidate C values for --calibrate");
  bo->callback([&] {
    action = [&] {
      const double eps = real(bo_eps), delta = real(bo_delta), C = real(bo_C), c = real(bo_c);
      Json r{{"epsilon", eps}, {"delta", delta}, {"C", C}, {"c", c}, {"k", bo_k}};
      r["sample_size"] = sample_size_bound(eps, delta, bo_k, C, c);
      if (bo_m || bo_n) {
        if (!bo_m || !bo_n) throw UsageError("--m and --n go together");
        r["m"] = bo_m;
        r["n"] = bo_n;
        r["generalization"] = generalization_bound(bo_m, bo_n, delta, bo_k, C, bo_weighted);
      }
      if (bo_calibrate) {
        const CalibrationResult cal = calibrate_c(bo_grid, {1, 2, 4, 5, 6}, 200, 8, 0.05, 4, g.seed);
        r["calibrated_C"] = cal.C;
        Json rates = Json::array();
        for (const auto& [cv, rate] : cal.success) rates.push_back({{"C", cv}, {"success", rate}});
        r["calibration"] = rates;
      }
      if (g.format == "csv") {
        Json flat = r;
        flat.erase("calibration");
        emit(g, out, "bounds.csv", csv_pairs(flat));
      } else {
        emit(g, out, "bounds.json", dump(r));
      }
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsageError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace fsmx::cli
