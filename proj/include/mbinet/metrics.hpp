#ifndef MBINET_METRICS_HPP
#define MBINET_METRICS_HPP

#include <string>
#include <vector>

namespace mbinet {

double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

// Pearson correlation. DegenerateInput on a constant vector (undefined
// correlation is an error, not a silent 0).
double lcc(const std::vector<double>& pred, const std::vector<double>& truth);

// Spearman: Pearson over average ranks (ties get the mean of their range).
double srcc(const std::vector<double>& pred, const std::vector<double>& truth);

std::vector<double> average_ranks(const std::vector<double>& v);

struct TrackMetrics {
  std::string track;  // track number, or "average" for the summary row
  std::size_t n = 0;
  double rmse = 0.0;
  double lcc = 0.0;
  double srcc = 0.0;
};

struct MetricsReport {
  std::vector<TrackMetrics> tracks;  // per-track rows
  TrackMetrics average;              // unweighted mean across tracks
};

// Averages each metric across tracks (unweighted); per-track rows retained.
MetricsReport track_report(const std::vector<TrackMetrics>& per_track);

// One line per track plus the averaged record:
//   track=<t> n=<n> rmse=<r> lcc=<l> srcc=<s>
std::string format_report(const MetricsReport& r);

}  // namespace mbinet

#endif  // MBINET_METRICS_HPP
