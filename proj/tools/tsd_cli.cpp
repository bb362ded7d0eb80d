#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tsd/decomp.hpp"
#include "tsd/errors.hpp"
#include "tsd/field_io.hpp"
#include "tsd/harness.hpp"
#include "tsd/model_io.hpp"
#include "tsd/montecarlo.hpp"
#include "tsd/version.hpp"

using namespace tsd;

namespace {

std::vector<double> numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DomainError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

Point vec(const std::string& s, int d) {
  const auto v = numbers(s);
  if (static_cast<int>(v.size()) != d) throw DomainError("'" + s + "' needs " + std::to_string(d) + " components");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d);
}

GridSpec grid_arg(const std::string& s, int d) {
  const auto v = numbers(s);
  if (v.size() != 2 || v[1] < 1 || v[1] != std::floor(v[1])) throw DomainError("--grid expects L,N");
  GridSpec g{d, v[0], static_cast<std::size_t>(v[1])};
  g.validate();
  return g;
}

// "-" or empty: stdout
struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw DomainError("cannot write " + path);
      out = &file;
    }
    *out << std::setprecision(17);
  }
  std::ostream& operator*() { return *out; }
};

PhiMethod method_arg(const std::string& s) {
  if (s == "auto") return PhiMethod::Auto;
  if (s == "quadrature") return PhiMethod::Quadrature;
  if (s == "tabulated") return PhiMethod::Tabulated;
  throw DomainError("--method is auto, quadrature or tabulated");
}

void header_x(std::ostream& o, int d) { o << (d == 1 ? "x" : "x0,x1"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities and heat-kernel envelopes of symmetric tempered Levy processes"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  std::string model_path, spec_path, grid_s, out, method_s = "auto";
  std::vector<std::string> xi_s, x_s;
  std::vector<double> t_list;
  double t = 1.0, eps = 0.0, tol = 1e-10;
  std::string eps_s = "auto", cache, mode_s = "gaussian", suite_path, out_dir = "reports";
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  auto* phi_cmd = app.add_subcommand("phi", "exponent Phi at given frequencies (CSV: xi..., phi)");
  phi_cmd->add_option("--model", model_path, "model JSON")->required();
  phi_cmd->add_option("--xi", xi_s, "frequency, comma-separated components; repeatable");
  phi_cmd->add_option("--grid", grid_s, "L,N: evaluate at the grid frequencies instead");
  phi_cmd->add_option("--method", method_s, "auto | quadrature | tabulated");

  auto* den_cmd = app.add_subcommand("density", "density on a grid (CSV: x..., p)");
  den_cmd->add_option("--model", model_path)->required();
  den_cmd->add_option("--t", t)->required();
  den_cmd->add_option("--grid", grid_s, "L,N (default: automatic)");
  den_cmd->add_option("--out", out, "CSV path, - for stdout");
  den_cmd->add_option("--cache", cache, "binary field cache; reused when grid and t match");
  den_cmd->add_option("--method", method_s);

  auto* dec_cmd = app.add_subcommand("decompose", "small-jump / compound-Poisson split, d = 1");
  dec_cmd->add_option("--model", model_path)->required();
  dec_cmd->add_option("--t", t)->required();
  dec_cmd->add_option("--eps", eps_s, "auto or a radius");
  dec_cmd->add_option("--grid", grid_s, "L,N")->required();
  dec_cmd->add_option("--tol", tol, "Poisson series tolerance");
  dec_cmd->add_option("--out", out);

  auto* env_cmd = app.add_subcommand("envelope", "envelope values (CSV: t, x..., env)");
  env_cmd->add_option("--spec", spec_path)->required();
  env_cmd->add_option("--t", t_list)->required()->delimiter(',');
  env_cmd->add_option("--x", x_s, "point, comma-separated components; repeatable")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo increments (CSV: x..., jumps)");
  sim_cmd->add_option("--model", model_path)->required();
  sim_cmd->add_option("--t", t)->required();
  sim_cmd->add_option("--eps", eps)->required();
  sim_cmd->add_option("--n", n);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--small-jumps", mode_s, "gaussian | drop");
  sim_cmd->add_option("--threads", threads);
  sim_cmd->add_option("--out", out);

  auto* ver_cmd = app.add_subcommand("verify", "run a verification suite");
  ver_cmd->add_option("--suite", suite_path)->required();
  ver_cmd->add_option("--out-dir", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*phi_cmd) {
      const auto model = load_model(model_path);
      const int d = model.dimension();
      PhiEvaluator ev(model, method_arg(method_s));
      std::vector<Point> xis;
      for (const auto& s : xi_s) xis.push_back(vec(s, d));
      if (!grid_s.empty()) {
        const auto g = grid_arg(grid_s, d);
        const std::size_t half = g.N / 2;
        for (std::size_t k = 0; k <= half; ++k) {
          if (d == 1) {
            xis.push_back(Point::Constant(1, k * g.dxi()));
            continue;
          }
          for (std::size_t l = 0; l <= half; ++l) {
            Point p(2);
            p << k * g.dxi(), l * g.dxi();
            xis.push_back(p);
          }
        }
      }
      if (xis.empty()) throw DomainError("phi needs --xi or --grid");
      Sink o("-");
      *o << (d == 1 ? "xi" : "xi0,xi1") << ",phi\n";
      for (const auto& xi : xis) {
        for (int i = 0; i < d; ++i) *o << xi(i) << ',';
        *o << ev(xi) << '\n';
      }
    } else if (*den_cmd) {
      const auto model = load_model(model_path);
      const int d = model.dimension();
      const auto grid = grid_s.empty() ? auto_grid(model, t) : grid_arg(grid_s, d);
      DensityField field;
      bool hit = false;
      if (!cache.empty() && std::filesystem::exists(cache)) {
        field = read_field(std::filesystem::path(cache));
        hit = field.grid.d == d && field.grid.N == grid.N && field.grid.L == grid.L && field.t == t;
      }
      if (!hit) {
        field = invert(model, t, grid, method_arg(method_s));
        if (!cache.empty()) write_field(field, std::filesystem::path(cache));
      }
      Sink o(out);
      write_field_csv(field, *o);
      std::cerr << "mass " << field.mass << " symmetry " << field.symmetry_defect() << (hit ? " (cached)" : "")
                << '\n';
    } else if (*dec_cmd) {
      const auto model = load_model(model_path);
      if (model.dimension() != 1) throw UnsupportedError("decompose supports d = 1");
      const auto grid = grid_arg(grid_s, 1);
      const double e = eps_s == "auto" ? default_eps(model, t) : numbers(eps_s).at(0);
      const auto s = split(model, e);
      const auto local = local_density(s, t, grid);
      const auto cp = compound_poisson(s, t, grid, tol, 1.0);
      const auto rec = recompose(local, cp);
      const auto direct = invert(model, t, grid);
      Sink o(out);
      *o << "x,p_local,p_cp_ac,p_recomposed,p_direct,abs_diff\n";
      double worst = 0.0;
      for (std::size_t j = 0; j < grid.N; ++j) {
        const double diff = std::abs(rec.values[j] - direct.values[j]);
        worst = std::max(worst, diff);
        *o << grid.x(j) << ',' << local.values[j] << ',' << cp.ac[j] << ',' << rec.values[j] << ','
           << direct.values[j] << ',' << diff << '\n';
      }
      std::cerr << "eps " << e << " lambda " << s.lambda() << " atom " << cp.atom_weight << " order " << cp.order
                << " overflow " << cp.overflow << " rel_defect " << worst / direct.max_value() << '\n';
    } else if (*env_cmd) {
      const auto spec = load_envelope(spec_path);
      Sink o("-");
      *o << "t,";
      header_x(*o, spec.d);
      *o << ",env\n";
      for (double tv : t_list)
        for (const auto& xs : x_s) {
          const auto x = vec(xs, spec.d);
          const auto v = envelope(spec, tv, x);
          *o << tv;
          for (int i = 0; i < spec.d; ++i) *o << ',' << x(i);
          *o << ',';
          if (v) *o << *v;
          else *o << "none";
          *o << '\n';
        }
    } else if (*sim_cmd) {
      const auto model = load_model(model_path);
      SamplerConfig cfg;
      cfg.t = t;
      cfg.eps = eps;
      cfg.count = n;
      cfg.seed = seed;
      if (mode_s == "drop") cfg.mode = SmallJumps::Drop;
      else if (mode_s != "gaussian") throw DomainError("--small-jumps is gaussian or drop");
      const auto set = simulate(model, cfg, threads);
      Sink o(out);
      header_x(*o, set.d);
      *o << ",jumps\n";
      for (std::size_t i = 0; i < set.size(); ++i) {
        for (int k = 0; k < set.d; ++k) *o << set.values[i * set.d + k] << ',';
        *o << set.jumps[i] << '\n';
      }
      std::cerr << "lambda " << set.lambda << " acceptance " << set.acceptance_rate << " gaussian_variance "
                << set.gaussian_variance << '\n';
    } else if (*ver_cmd) {
      const auto res = run_suite(std::filesystem::path(suite_path), out_dir);
      for (const auto& r : res.report["results"])
        std::cout << r.value("verdict", std::string("FAIL")) << ' ' << r.value("kind", std::string()) << ' '
                  << r.value("model", std::string()) << ' ' << r.value("spec", std::string()) << '\n';
      for (const auto& f : res.failures) std::cerr << "FAIL " << f << '\n';
      std::cout << res.report["results"].size() - res.failures.size() << '/' << res.report["results"].size()
                << " passed\n";
      return res.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
