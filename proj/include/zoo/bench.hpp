#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "zoo/errors.hpp"
#include "zoo/ndarray.hpp"
#include "zoo/runtime.hpp"

namespace zoo::bench {

struct BenchResult {
  std::string workload;
  std::string param;  // ndarray size, side length or starting point
  int trials = 0;
  double mean_ns = 0.0;
  double std_ns = 0.0;
};

struct BenchConfig {
  std::vector<std::string> workloads;  // subset of the known workload names
  std::vector<std::size_t> map_sizes = {1000, 10000, 100000, 1000000};
  std::vector<std::size_t> fold_sizes = {1000, 10000, 100000, 1000000};
  std::vector<std::size_t> conv_sides = {8, 16, 32, 64};
  int trials = 10;
  int warmup = 3;
};

inline const std::vector<std::string>& known_workloads() {
  static const std::vector<std::string> names = {"map", "fold", "gd_sin",
                                                 "gd_cubic", "conv_toy"};
  return names;
}

namespace detail {

template <class T>
inline void do_not_optimize(const T& value) {
  asm volatile("" : : "g"(&value) : "memory");
}

// Times one trial; per-op time comes from `inner` back-to-back runs so the
// clock resolution cannot dominate at small sizes.
template <class Fn>
double time_once_ns(Fn fn, int inner) {
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < inner; ++i) fn();
  auto stop = std::chrono::steady_clock::now();
  auto total =
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  return static_cast<double>(total) / inner;
}

template <class Fn>
std::pair<double, double> measure(Fn fn, int trials, int warmup) {
  // Calibrate the batch size so a trial spans at least ~50us.
  int inner = 1;
  while (time_once_ns(fn, inner) * inner < 50000.0 && inner < (1 << 20))
    inner *= 2;

  for (int i = 0; i < warmup; ++i) time_once_ns(fn, inner);

  std::vector<double> samples(static_cast<std::size_t>(trials));
  for (auto& s : samples) s = time_once_ns(fn, inner);

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= trials;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = trials > 1 ? var / (trials - 1) : 0.0;
  return {mean, std::sqrt(var)};
}

inline void check(bool ok, const std::string& what) {
  if (!ok) throw Error("benchmark oracle failed: " + what);
}

}  // namespace detail

// Runs the configured workloads. Every timed operation is also checked
// against its closed-form oracle, so timing never silently breaks results.
inline std::vector<BenchResult> run_suite(const BenchConfig& config) {
  std::vector<BenchResult> results;

  auto add = [&](const std::string& workload, const std::string& param,
                 std::pair<double, double> stat) {
    results.push_back(
        {workload, param, config.trials, stat.first, stat.second});
  };

  for (const auto& w : config.workloads) {
    if (w == "map") {
      for (std::size_t n : config.map_sizes) {
        Ndarray a = Ndarray::arange(n);
        Ndarray out = nd_map([](double x) { return x * 2.0; }, a);
        detail::check(out.shape == a.shape, "map preserves shape");
        detail::check(out.data[n - 1] == 2.0 * (n - 1), "map last element");
        add(w, std::to_string(n), detail::measure(
                                      [&] {
                                        Ndarray r = nd_map(
                                            [](double x) { return x * 2.0; }, a);
                                        detail::do_not_optimize(r.data[0]);
                                      },
                                      config.trials, config.warmup));
      }
    } else if (w == "fold") {
      for (std::size_t n : config.fold_sizes) {
        Ndarray a = Ndarray::arange(n);
        double sum = nd_fold([](double acc, double x) { return acc + x; }, 0.0, a);
        double expected = static_cast<double>(n) * (n - 1) / 2.0;
        detail::check(sum == expected, "fold sum formula");
        add(w, std::to_string(n), detail::measure(
                                      [&] {
                                        double r = nd_fold(
                                            [](double acc, double x) {
                                              return acc + x;
                                            },
                                            0.0, a);
                                        detail::do_not_optimize(r);
                                      },
                                      config.trials, config.warmup));
      }
    } else if (w == "gd_sin") {
      GdConfig cfg;
      cfg.init = 5.0;
      auto f = [](double x) { return std::sin(x); };
      GdResult r = gradient_descent(f, cfg);
      detail::check(std::fabs(r.argmin - 3.0 * M_PI / 2.0) < 1e-4,
                    "sin argmin at 3*pi/2");
      add(w, "5", detail::measure(
                      [&] {
                        GdResult g = gradient_descent(f, cfg);
                        detail::do_not_optimize(g.argmin);
                      },
                      config.trials, config.warmup));
    } else if (w == "gd_cubic") {
      GdConfig cfg;
      cfg.init = 4.0;
      auto f = [](double x) { return x * x * x - 2.0 * x * x + 2.0; };
      GdResult r = gradient_descent(f, cfg);
      detail::check(std::fabs(r.argmin - 4.0 / 3.0) < 1e-4,
                    "cubic argmin at 4/3");
      add(w, "4", detail::measure(
                      [&] {
                        GdResult g = gradient_descent(f, cfg);
                        detail::do_not_optimize(g.argmin);
                      },
                      config.trials, config.warmup));
    } else if (w == "conv_toy") {
      for (std::size_t side : config.conv_sides) {
        Ndarray input = Ndarray::zeros({side, side});
        for (std::size_t i = 0; i < input.size(); ++i)
          input.data[i] = std::sin(static_cast<double>(i));
        Ndarray kernel({3, 3}, {0.0625, 0.125, 0.0625, 0.125, 0.25, 0.125,
                                0.0625, 0.125, 0.0625});

        Ndarray fast = conv2d_valid(input, kernel);
        Ndarray naive = Ndarray::zeros(fast.shape);
        for (std::size_t i = 0; i < naive.shape[0]; ++i)
          for (std::size_t j = 0; j < naive.shape[1]; ++j) {
            double acc = 0.0;
            for (std::size_t u = 0; u < 3; ++u)
              for (std::size_t v = 0; v < 3; ++v)
                acc += input.at2(i + u, j + v) * kernel.at2(u, v);
            naive.at2(i, j) = acc;
          }
        for (std::size_t i = 0; i < fast.size(); ++i)
          detail::check(std::fabs(fast.data[i] - naive.data[i]) <= 1e-12,
                        "conv matches naive loop");

        add(w, std::to_string(side), detail::measure(
                                         [&] {
                                           Ndarray r = conv2d_valid(input, kernel);
                                           detail::do_not_optimize(r.data[0]);
                                         },
                                         config.trials, config.warmup));
      }
    } else {
      throw UnknownWorkloadError(w);
    }
  }
  return results;
}

inline std::string results_csv(const std::vector<BenchResult>& results) {
  std::string out = "workload,param,trials,mean_ns,std_ns\n";
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%s,%d,%.3f,%.3f\n",
                  r.workload.c_str(), r.param.c_str(), r.trials, r.mean_ns,
                  r.std_ns);
    out += line;
  }
  return out;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least-squares fit of log(mean time) against log(param) for one workload.
// Requires at least 3 distinct sizes spanning two decades.
inline FitResult scaling_fit(const std::vector<BenchResult>& results) {
  std::vector<double> xs, ys;
  for (const auto& r : results) {
    double param;
    try {
      param = std::stod(r.param);
    } catch (...) {
      throw InsufficientDataError("param \"" + r.param + "\" is not numeric");
    }
    if (param <= 0 || r.mean_ns <= 0)
      throw InsufficientDataError("log-log fit needs positive values");
    xs.push_back(std::log10(param));
    ys.push_back(std::log10(r.mean_ns));
  }

  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw InsufficientDataError("need at least 3 distinct sizes");
  if (distinct.back() - distinct.front() < 2.0)
    throw InsufficientDataError("sizes must span at least two decades");

  std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

// Minimal log-log SVG chart of mean_ns against numeric param, one polyline
// per workload.
inline std::string plot_svg(const std::vector<BenchResult>& results) {
  const double width = 640, height = 480, margin = 60;

  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
      series;
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const auto& r : results) {
    double param;
    try {
      param = std::stod(r.param);
    } catch (...) {
      continue;
    }
    if (param <= 0 || r.mean_ns <= 0) continue;
    double x = std::log10(param), y = std::log10(r.mean_ns);
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const auto& s) { return s.first == r.workload; });
    if (it == series.end()) {
      series.push_back({r.workload, {{x, y}}});
    } else {
      it->second.push_back({x, y});
    }
  }
  if (series.empty() || max_x == min_x) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
  }
  if (max_y == min_y) max_y = min_y + 1;

  auto sx = [&](double x) {
    return margin + (x - min_x) / (max_x - min_x) * (width - 2 * margin);
  };
  auto sy = [&](double y) {
    return height - margin - (y - min_y) / (max_y - min_y) * (height - 2 * margin);
  };

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd"};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(int(width)) + "\" height=\"" +
                    std::to_string(int(height)) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(int(width / 2)) + "\" y=\"" +
         std::to_string(int(height - 15)) +
         "\" text-anchor=\"middle\" font-size=\"13\">log10(size)</text>\n";
  svg += "<text x=\"18\" y=\"" + std::to_string(int(height / 2)) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
         "18 " + std::to_string(int(height / 2)) +
         ")\">log10(mean ns)</text>\n";

  int ci = 0;
  double legend_y = margin;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = colors[ci++ % 5];
    std::string poly;
    for (const auto& [x, y] : pts) {
      poly += std::to_string(sx(x)) + "," + std::to_string(sy(y)) + " ";
      svg += "<circle cx=\"" + std::to_string(sx(x)) + "\" cy=\"" +
             std::to_string(sy(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    if (pts.size() > 1)
      svg += "<polyline points=\"" + poly +
             "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + std::to_string(int(width - margin + 5)) + "\" y=\"" +
           std::to_string(legend_y) + "\" font-size=\"12\" fill=\"" + color +
           "\">" + name + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << body;
}

}  // namespace zoo::bench
