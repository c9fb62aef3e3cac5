/// \file
/// Beltrami coefficients measured on a rectilinear grid: a CSV table of
/// x, y, Re μ, Im μ, evaluated by nearest cell.

#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qcb/core.hpp"

namespace qcb {

class SampledGrid {
 public:
  /// Rows "x,y,re,im"; one optional non-numeric header line; '#' comments.
  static SampledGrid parse(std::istream& in) {
    std::map<std::pair<double, double>, Complex> cells;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double x, y, re, im;
      if (!(ls >> x >> y >> re >> im)) {
        if (!header_seen && cells.empty()) {
          header_seen = true;
          continue;
        }
        throw FormatError("grid line " + std::to_string(lineno) + " is not x,y,re,im");
      }
      if (!cells.emplace(std::make_pair(x, y), Complex(re, im)).second)
        throw FormatError("duplicate grid node at line " + std::to_string(lineno));
    }
    if (cells.empty()) throw FormatError("empty grid");
    SampledGrid g;
    for (const auto& [k, v] : cells) {
      g.xs_.push_back(k.first);
      g.ys_.push_back(k.second);
    }
    auto uniq = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(g.xs_);
    uniq(g.ys_);
    if (g.xs_.size() * g.ys_.size() != cells.size())
      throw FormatError("grid is not rectilinear: " + std::to_string(cells.size()) + " nodes for " +
                        std::to_string(g.xs_.size()) + " x " + std::to_string(g.ys_.size()));
    g.values_.resize(cells.size());
    for (const auto& [k, v] : cells) g.values_[g.index(k.first, k.second)] = v;
    return g;
  }

  static SampledGrid load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open grid file " + path);
    return parse(in);
  }

  Complex operator()(Complex z) const {
    return values_[nearest(xs_, z.real()) * ys_.size() + nearest(ys_, z.imag())];
  }

  std::size_t nx() const { return xs_.size(); }
  std::size_t ny() const { return ys_.size(); }

  BeltramiField field(Domain domain, const std::string& label, double clip_epsilon = 1e-9) const {
    auto self = std::make_shared<const SampledGrid>(*this);
    return BeltramiField(domain, [self](Complex z) { return (*self)(z); }, label, {}, clip_epsilon);
  }

 private:
  std::vector<double> xs_, ys_;
  std::vector<Complex> values_;

  std::size_t index(double x, double y) const {
    const auto i = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(ys_.begin(), ys_.end(), y) - ys_.begin());
    return i * ys_.size() + j;
  }

  /// Nearest node; ties go to the upper node, points outside clamp to the edge.
  static std::size_t nearest(const std::vector<double>& v, double x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.begin()) return 0;
    if (it == v.end()) return v.size() - 1;
    const auto hi = static_cast<std::size_t>(it - v.begin());
    return (x - v[hi - 1] < v[hi] - x) ? hi - 1 : hi;
  }
};

}  // namespace qcb
