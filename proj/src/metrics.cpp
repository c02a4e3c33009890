#include "mbinet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mbinet/error.hpp"

namespace mbinet {

namespace {

void check_pair(const std::vector<double>& a, const std::vector<double>& b,
                std::size_t min_n) {
  if (a.size() != b.size())
    fail(ErrorKind::LengthMismatch, "vectors differ in length");
  if (a.size() < min_n) fail(ErrorKind::EmptyInput, "too few points");
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); i++) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    fail(ErrorKind::DegenerateInput,
         "correlation undefined for a constant vector");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); i++) {
    double d = pred[i] - truth[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double lcc(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 2);
  return pearson(pred, truth);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) j++;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; k++) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double srcc(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 2);
  return pearson(average_ranks(pred), average_ranks(truth));
}

MetricsReport track_report(const std::vector<TrackMetrics>& per_track) {
  if (per_track.empty()) fail(ErrorKind::EmptyInput, "no track metrics");
  MetricsReport r;
  r.tracks = per_track;
  r.average.track = "average";
  for (const TrackMetrics& t : per_track) {
    r.average.n += t.n;
    r.average.rmse += t.rmse;
    r.average.lcc += t.lcc;
    r.average.srcc += t.srcc;
  }
  const double k = static_cast<double>(per_track.size());
  r.average.rmse /= k;
  r.average.lcc /= k;
  r.average.srcc /= k;
  return r;
}

namespace {

std::string format_row(const TrackMetrics& t) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "track=%s n=%zu rmse=%.6f lcc=%.6f srcc=%.6f\n",
                t.track.c_str(), t.n, t.rmse, t.lcc, t.srcc);
  return buf;
}

}  // namespace

std::string format_report(const MetricsReport& r) {
  std::string out;
  for (const TrackMetrics& t : r.tracks) out += format_row(t);
  out += format_row(r.average);
  return out;
}

}  // namespace mbinet
