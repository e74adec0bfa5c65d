#include "pivotbench/cli.hpp"

#include "pivotbench/harness.hpp"
#include "pivotbench/orchard.hpp"
#include "pivotbench/parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace pivotbench {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SourceOptions {
  std::string data;
  std::string gen;
  Eigen::Index d = 8;
  Eigen::Index n = 10'000;
  std::uint64_t data_seed = 1;
  CLI::Option* data_seed_opt = nullptr;
  std::string metric;
};

void add_source(CLI::App* app, SourceOptions& o) {
  app->add_option("--data", o.data, "ASCII dataset file");
  app->add_option("--gen", o.gen, "Generator: cube, sphere, hamming")
      ->check(CLI::IsMember({"cube", "sphere", "hamming"}));
  app->add_option("--d", o.d, "Generator dimension")->capture_default_str();
  app->add_option("--n", o.n, "Generator point count")->capture_default_str();
  o.data_seed_opt = app->add_option("--data-seed", o.data_seed, "Generator seed (defaults to --seed)");
  app->add_option("--metric", o.metric, "Metric override: l2, linf, hamming, hamming-raw, geodesic");
}

DatasetSpec to_spec(const SourceOptions& o, std::uint64_t fallback_seed) {
  if (o.data.empty() == o.gen.empty()) throw UsageError("exactly one of --data or --gen is required");
  DatasetSpec spec;
  if (!o.gen.empty()) {
    spec.generator = parse_generator(o.gen);
    spec.dim = o.d;
    spec.count = o.n;
    spec.seed = Seed{o.data_seed_opt->count() ? o.data_seed : fallback_seed};
  } else {
    spec.file = o.data;
  }
  if (!o.metric.empty()) spec.metric = parse_metric(o.metric);
  return spec;
}

/// Writes to --out when given, else to the default stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string join_reals(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty()) s += ',';
    s += format_real(v);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<SelectionStrategy> parse_strategies(const std::vector<std::string>& names, Eigen::Index j) {
  std::vector<SelectionStrategy> out;
  for (const auto& name : names) {
    if (name == "random")
      out.push_back({SelectionMode::Random, RandomPairs{}});
    else if (name == "incremental")
      out.push_back({SelectionMode::Incremental, RandomPairs{}});
    else if (name == "smart")
      out.push_back({SelectionMode::Incremental, SmartKnn{j}});
    else
      throw UsageError("unknown selection mode: " + name + " (expected random, incremental, smart)");
  }
  return out;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pivotbench: pivot-based metric indexing workbench"};
  app.require_subcommand(1);
  std::string out_path;
  std::uint64_t seed = 1;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string gen_kind;
  Eigen::Index gen_d = 8, gen_n = 1000;
  gen->add_option("kind", gen_kind, "cube, sphere, hamming")->required()->check(CLI::IsMember({"cube", "sphere", "hamming"}));
  gen->add_option("--d", gen_d, "Dimension")->capture_default_str();
  gen->add_option("--n", gen_n, "Point count")->capture_default_str();
  gen->add_option("--seed", seed, "Seed")->capture_default_str();
  gen->add_option("--out", out_path, "Output file (default stdout)");

  // dim
  auto* dim = app.add_subcommand("dim", "Chavez intrinsic dimension");
  SourceOptions dim_src;
  std::size_t dim_pairs = 100'000;
  add_source(dim, dim_src);
  dim->add_option("--pairs", dim_pairs, "Sampled pairs")->capture_default_str();
  dim->add_option("--seed", seed)->capture_default_str();
  dim->add_option("--out", out_path);

  // hist
  auto* hist = app.add_subcommand("hist", "Histogram of pairwise distances");
  SourceOptions hist_src;
  std::size_t hist_pairs = 100'000, hist_bins = 100;
  bool hist_normalize = false;
  add_source(hist, hist_src);
  hist->add_option("--pairs", hist_pairs)->capture_default_str();
  hist->add_option("--bins", hist_bins)->capture_default_str();
  hist->add_flag("--normalize", hist_normalize, "Divide distances by sqrt(d)");
  hist->add_option("--seed", seed)->capture_default_str();
  hist->add_option("--out", out_path);

  // project
  auto* project = app.add_subcommand("project", "Project a dataset onto two coordinates");
  SourceOptions proj_src;
  Eigen::Index axis_i = 0, axis_j = 1;
  add_source(project, proj_src);
  project->add_option("--i", axis_i)->capture_default_str();
  project->add_option("--j", axis_j)->capture_default_str();
  project->add_option("--seed", seed)->capture_default_str();
  project->add_option("--out", out_path);

  // conc-sphere
  auto* conc = app.add_subcommand("conc-sphere", "Sphere concentration function table");
  std::vector<int> conc_dims{2, 3, 10, 30, 100};
  std::size_t conc_steps = 20;
  conc->add_option("--d", conc_dims, "Ambient dimensions")->delimiter(',')->capture_default_str();
  conc->add_option("--steps", conc_steps, "Grid intervals on [0, pi/2]")->capture_default_str();
  conc->add_option("--out", out_path);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Closed-form bound calculators");
  bounds->require_subcommand(1);
  auto* vc = bounds->add_subcommand("vc", "VC-dimension bound for k-pivot discard sets");
  std::string vc_space = "l2";
  double vc_d = 20, vc_k = 50;
  vc->add_option("--space", vc_space)->check(CLI::IsMember({"l2", "linf", "hamming"}))->capture_default_str();
  vc->add_option("--d", vc_d)->capture_default_str();
  vc->add_option("--k", vc_k)->capture_default_str();
  auto* ss = bounds->add_subcommand("sample-size", "Sample size for uniform eps-accuracy");
  BoundInputs ss_in;
  ss->add_option("--delta", ss_in.delta)->capture_default_str();
  ss->add_option("--eps", ss_in.eps)->capture_default_str();
  ss->add_option("--eta", ss_in.eta)->capture_default_str();
  auto* hoeff = bounds->add_subcommand("hoeffding", "Hoeffding deviation bound");
  double h_n = 200, h_eps = 0.1;
  hoeff->add_option("--n", h_n)->capture_default_str();
  hoeff->add_option("--eps", h_eps)->capture_default_str();
  auto* levy = bounds->add_subcommand("levy", "Normal Levy family bound");
  double l_C = 1, l_c = 0.5, l_d = 99, l_eps = 0.3;
  levy->add_option("--C", l_C)->capture_default_str();
  levy->add_option("--c", l_c)->capture_default_str();
  levy->add_option("--d", l_d)->capture_default_str();
  levy->add_option("--eps", l_eps)->capture_default_str();
  for (auto* b : {vc, ss, hoeff, levy}) b->add_option("--out", out_path);

  // build
  auto* build = app.add_subcommand("build", "Select pivots and write a pivot index");
  SourceOptions build_src;
  Eigen::Index build_k = 16;
  std::string build_select = "incremental";
  std::size_t pair_count = 5000, candidates = 40;
  Eigen::Index smart_j = 20;
  std::string index_path;
  add_source(build, build_src);
  build->add_option("--k", build_k)->capture_default_str();
  build->add_option("--select", build_select, "random, incremental, smart")->capture_default_str();
  build->add_option("-A,--pairs", pair_count)->capture_default_str();
  build->add_option("-N,--candidates", candidates)->capture_default_str();
  build->add_option("--j", smart_j, "Neighbour rank for smart pairs")->capture_default_str();
  build->add_option("--seed", seed)->capture_default_str();
  build->add_option("--index", index_path, "Index output file")->required();
  build->add_option("--out", out_path);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Query-cost sweep over pivot counts");
  SourceOptions sweep_src;
  std::string sweep_ks = "4,8,16,32,64", sweep_modes = "random,incremental";
  ExperimentConfig cfg;
  add_source(sweep, sweep_src);
  sweep->add_option("--k", sweep_ks, "Ascending pivot counts")->capture_default_str();
  sweep->add_option("--modes", sweep_modes, "random, incremental, smart")->capture_default_str();
  sweep->add_option("-A,--pairs", cfg.pair_count)->capture_default_str();
  sweep->add_option("-N,--candidates", cfg.candidates)->capture_default_str();
  sweep->add_option("--j", smart_j)->capture_default_str();
  sweep->add_option("--queries", cfg.query_count)->capture_default_str();
  sweep->add_option("--probes", cfg.probe_count)->capture_default_str();
  sweep->add_option("--target", cfg.target_fraction, "Target result fraction")->capture_default_str();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--out", out_path);

  // orchard-bench
  auto* orch = app.add_subcommand("orchard-bench", "Orchard 1-NN benchmark against brute force");
  SourceOptions orch_src;
  std::size_t orch_queries = 1000;
  Eigen::Index orch_cap = OrchardIndex::kDefaultMaxPoints;
  bool orch_allow_large = false;
  add_source(orch, orch_src);
  orch->add_option("--queries", orch_queries)->capture_default_str();
  orch->add_option("--max-points", orch_cap)->capture_default_str();
  orch->add_flag("--allow-large", orch_allow_large, "Build even when n exceeds --max-points");
  orch->add_option("--seed", seed)->capture_default_str();
  orch->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      Output o(out_path, out);
      write_ascii(generate(parse_generator(gen_kind), gen_d, gen_n, Seed{seed}), *o);
    } else if (dim->parsed()) {
      const Dataset ds = to_spec(dim_src, seed).materialize();
      DistanceCounter counter;
      const auto est = chavez_dimension(ds, dim_pairs, Seed{seed}, counter);
      Output o(out_path, out);
      *o << "label,n,d,metric,pairs,mean,variance,dtilde\n"
         << ds.label() << ',' << ds.size() << ',' << ds.dim() << ',' << to_string(ds.metric()) << ','
         << est.pairs_used << ',' << join_reals({est.mean, est.variance, est.dtilde}) << '\n';
    } else if (hist->parsed()) {
      const Dataset ds = to_spec(hist_src, seed).materialize();
      DistanceCounter counter;
      const auto h = distance_histogram(ds, hist_pairs, hist_bins, hist_normalize, Seed{seed}, counter);
      Output o(out_path, out);
      *o << "bin,lo,hi,count,mean,std\n";
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        *o << b << ',' << join_reals({h.edges[b], h.edges[b + 1]}) << ',' << h.counts[b] << ','
           << join_reals({h.mean, h.stddev}) << '\n';
    } else if (project->parsed()) {
      const Dataset ds = to_spec(proj_src, seed).materialize();
      const auto pts = project2d(ds, axis_i, axis_j);
      Output o(out_path, out);
      *o << "x,y\n";
      for (const auto& [x, y] : pts) *o << join_reals({x, y}) << '\n';
    } else if (conc->parsed()) {
      if (conc_steps < 1) throw UsageError("--steps must be >= 1");
      Output o(out_path, out);
      *o << "d,eps,alpha,sphere_bound\n";
      for (int d : conc_dims)
        for (std::size_t s = 0; s <= conc_steps; ++s) {
          const double eps = std::numbers::pi / 2.0 * static_cast<double>(s) / static_cast<double>(conc_steps);
          *o << d << ','
             << join_reals({eps, sphere_concentration(d, eps), std::exp(-(d - 1) * eps * eps / 2.0)}) << '\n';
        }
    } else if (bounds->parsed()) {
      Output o(out_path, out);
      if (vc->parsed()) {
        *o << "space,d,k,value\n"
           << vc_space << ',' << join_reals({vc_d, vc_k, vc_bound(parse_vc_space(vc_space), vc_d, vc_k)}) << '\n';
      } else if (ss->parsed()) {
        *o << "delta,eps,eta,value\n" << join_reals({ss_in.delta, ss_in.eps, ss_in.eta, sample_size_bound(ss_in)}) << '\n';
      } else if (hoeff->parsed()) {
        *o << "n,eps,value\n" << join_reals({h_n, h_eps, hoeffding_bound(h_n, h_eps)}) << '\n';
      } else {
        const auto lb = levy_bound(l_C, l_c, l_d, l_eps);
        *o << "C,c,d,eps,raw,reported\n" << join_reals({l_C, l_c, l_d, l_eps, lb.raw, lb.reported}) << '\n';
      }
    } else if (build->parsed()) {
      const Dataset ds = to_spec(build_src, seed).materialize();
      const auto strategy = parse_strategies({build_select}, smart_j).front();
      DistanceCounter counter;
      std::vector<Eigen::Index> pivots;
      if (strategy.mode == SelectionMode::Random)
        pivots = select_random(ds, build_k, Seed{seed});
      else
        pivots = select_incremental(ds, SelectionConfig{build_k, pair_count, candidates, Seed{seed}, strategy.pair_mode},
                                    counter);
      const auto idx = build_index(ds, pivots, counter);
      save_index(idx, index_path);
      Output o(out_path, out);
      *o << "n,d,k,selection_mode,build_cost\n"
         << ds.size() << ',' << ds.dim() << ',' << build_k << ',' << strategy.name() << ',' << counter.count << '\n';
    } else if (sweep->parsed()) {
      cfg.dataset = to_spec(sweep_src, seed);
      cfg.seed = Seed{seed};
      cfg.strategies = parse_strategies(split_list(sweep_modes), smart_j);
      cfg.k_sweep.clear();
      for (const auto& k : split_list(sweep_ks)) cfg.k_sweep.push_back(std::stoll(k));
      const Dataset ds = cfg.dataset.materialize();
      cfg.validate();
      Output o(out_path, out);
      *o << "# centers=" << (cfg.dataset.generator ? "generator" : "leave-one-out") << '\n'
         << kSweepCsvHeader << '\n';
      (*o).flush();
      run_sweep(cfg, ds, [&](const ExperimentRow& row) {
        write_csv_row(row, *o);
        (*o).flush();
      });
    } else if (orch->parsed()) {
      const Dataset ds = to_spec(orch_src, seed).materialize();
      if (!ds.source()) throw UsageError("orchard-bench draws queries from a generator; use --gen");
      DistanceCounter build_counter;
      const auto idx = build_orchard(ds, build_counter, orch_cap, orch_allow_large);
      GeneratorSpec qspec = *ds.source();
      qspec.seed = Seed{seed};
      std::vector<std::uint64_t> costs(orch_queries);
      std::vector<char> mismatch(orch_queries, 0);
      parallel_for(orch_queries, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t q = begin; q < end; ++q) {
          const Point center = draw_point(qspec, StreamDomain::Queries, q);
          DistanceCounter c;
          const auto res = orchard_nn(idx, ds, center, Seed{seed}, q, c);
          costs[q] = res.cost;
          Eigen::Index best = 0;
          double best_d = evaluate(ds.metric(), center, ds.point(0));
          for (Eigen::Index x = 1; x < ds.size(); ++x) {
            const double dx = evaluate(ds.metric(), center, ds.point(x));
            if (dx < best_d) best = x, best_d = dx;
          }
          mismatch[q] = best != res.nn_id;
        }
      });
      std::uint64_t total = 0, worst = 0;
      for (auto c : costs) total += c, worst = std::max(worst, c);
      const auto mismatches = std::count(mismatch.begin(), mismatch.end(), 1);
      Output o(out_path, out);
      *o << "d,n,queries,build_cost,avg_cost,max_cost,mismatches\n"
         << ds.dim() << ',' << ds.size() << ',' << orch_queries << ',' << build_counter.count << ','
         << format_real(static_cast<double>(total) / static_cast<double>(std::max<std::size_t>(orch_queries, 1))) << ','
         << worst << ',' << mismatches << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace pivotbench
