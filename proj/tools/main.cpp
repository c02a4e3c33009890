#include <CLI11.hpp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mbinet/dsp.hpp"
#include "mbinet/embedding.hpp"
#include "mbinet/error.hpp"
#include "mbinet/log.hpp"
#include "mbinet/manifest.hpp"
#include "mbinet/model.hpp"
#include "mbinet/rng.hpp"
#include "mbinet/training.hpp"
#include "mbinet/wav.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(mbinet::ErrorKind k) {
  using mbinet::ErrorKind;
  switch (k) {
    case ErrorKind::UsageError:
      return kExitUsage;
    case ErrorKind::IoError:
    case ErrorKind::NonFiniteLoss:
      return kExitRuntime;
    default:
      return kExitData;
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) mbinet::fail(mbinet::ErrorKind::IoError, "cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f)
    mbinet::fail(mbinet::ErrorKind::IoError,
                 "cannot open '" + path + "' for writing");
  f << text;
  if (!f) mbinet::fail(mbinet::ErrorKind::IoError, "short write to '" + path + "'");
}

std::string checksum_hex(const Eigen::MatrixXd& m) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (Eigen::Index i = 0; i < m.rows(); i++)
    for (Eigen::Index j = 0; j < m.cols(); j++) {
      double d = m(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &d, 8);
      for (int b = 0; b < 8; b++) {
        h ^= (bits >> (8 * b)) & 0xFF;
        h *= 0x100000001B3ULL;
      }
    }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json metrics_json(const mbinet::TrackMetrics& t) {
  return json{{"track", t.track}, {"n", t.n},       {"rmse", t.rmse},
              {"lcc", t.lcc},     {"srcc", t.srcc}};
}

int cmd_train(const std::string& config_path, const std::string& resume) {
  mbinet::RunConfig cfg = mbinet::parse_run_config(config_path);
  mbinet::TrainResult r = mbinet::train(cfg, resume);
  json rec{{"best_checkpoint", r.best_path},
           {"last_checkpoint", r.last_path},
           {"log", r.log_path},
           {"epochs_run", r.epochs_run},
           {"best_selection_loss", r.best_selection_loss},
           {"selected_on_dev", r.selected_on_dev}};
  std::cout << rec.dump() << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& ckpt, const std::string& manifest,
             const std::string& part_name, int workers,
             double ratio_override, const std::string& report_path) {
  mbinet::SplitPart part;
  if (part_name == "train")
    part = mbinet::SplitPart::Train;
  else if (part_name == "dev")
    part = mbinet::SplitPart::Dev;
  else
    mbinet::fail(mbinet::ErrorKind::UsageError,
                 "--split must be train or dev");

  mbinet::EvalOptions opts;
  opts.workers = workers;
  opts.split_ratio_override = ratio_override;
  mbinet::EvalResult r = mbinet::evaluate(ckpt, manifest, part, opts);

  write_text_file(report_path, mbinet::format_report(r.intelligibility));
  json rec{{"report", report_path},
           {"average", metrics_json(r.intelligibility.average)}};
  if (r.haspi) {
    std::string haspi_path = report_path + ".haspi";
    write_text_file(haspi_path, mbinet::format_report(*r.haspi));
    rec["haspi_report"] = haspi_path;
    rec["haspi_average"] = metrics_json(r.haspi->average);
  }
  std::cout << rec.dump() << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& ckpt, const std::string& wav,
                const std::string& listener_arg, bool with_frames) {
  std::string text = listener_arg;
  std::string origin = "inline listener";
  if (!listener_arg.empty() && listener_arg[0] != '{') {
    text = read_text_file(listener_arg);
    origin = listener_arg;
  }
  mbinet::ListenerProfile l = mbinet::parse_listener_text(text, origin);
  mbinet::PredictRecord r = mbinet::predict(ckpt, wav, l);

  json rec{{"wav", wav}, {"intelligibility", r.intelligibility}};
  if (r.haspi) rec["haspi"] = *r.haspi;
  if (with_frames) rec["frames"] = r.frame_merged;
  std::cout << rec.dump() << "\n";
  return kExitOk;
}

int cmd_fixtures(const std::string& manifest_path, const std::string& out_dir,
                 int dim, std::uint64_t seed) {
  auto entries = mbinet::parse_manifest(manifest_path);
  std::filesystem::create_directories(out_dir);
  mbinet::ProviderSpec spec;
  spec.kind = mbinet::ProviderKind::Mock;
  spec.dim = dim;
  spec.seed = seed;
  auto provider = mbinet::make_provider(spec);
  std::string manifest_dir =
      std::filesystem::path(manifest_path).parent_path().string();

  int written = 0;
  for (const mbinet::ManifestEntry& e : entries) {
    std::string wav_path = e.signal_path;
    if (!std::filesystem::path(wav_path).is_absolute() && !manifest_dir.empty())
      wav_path = (std::filesystem::path(manifest_dir) / wav_path).string();
    mbinet::StereoWaveform w =
        mbinet::resample(mbinet::load_wav(wav_path), mbinet::kCanonicalRateHz);
    mbinet::EmbeddingFrames left =
        provider->embed(w.left, e.utterance_id + ".L");
    mbinet::EmbeddingFrames right =
        provider->embed(w.right, e.utterance_id + ".R");
    mbinet::write_fixture(out_dir, e.utterance_id + ".L", left);
    mbinet::write_fixture(out_dir, e.utterance_id + ".R", right);
    written += 2;
    json rec{{"utterance_id", e.utterance_id},
             {"frames", left.frames()},
             {"dim", dim}};
    std::cout << rec.dump() << "\n";
  }
  json summary{{"written", written}, {"out", out_dir}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_inspect(const std::string& ckpt) {
  mbinet::ParameterSet params;
  mbinet::CheckpointMeta meta = mbinet::load_checkpoint(ckpt, params);
  json tasks = json::array();
  for (mbinet::Task t : meta.cfg.tasks) tasks.push_back(mbinet::task_name(t));
  json arrays = json::array();
  for (const mbinet::ParamArray* a : params.arrays())
    arrays.push_back({{"name", a->name},
                      {"rows", a->value.rows()},
                      {"cols", a->value.cols()},
                      {"checksum", checksum_hex(a->value)}});
  json rec{{"checkpoint", ckpt},
           {"model",
            {{"lfb_filters", meta.cfg.lfb_filters},
             {"lfb_kernel", meta.cfg.lfb_kernel},
             {"cnn_channels", meta.cfg.cnn_channels},
             {"blstm_hidden", meta.cfg.blstm_hidden},
             {"attn_dim", meta.cfg.attn_dim},
             {"ps_bins", meta.cfg.ps_bins},
             {"emb_dim", meta.cfg.emb_dim},
             {"tasks", tasks},
             {"seed", meta.cfg.seed}}},
           {"epoch", meta.train.epoch},
           {"has_adam", meta.has_adam},
           {"arrays", arrays}};
  std::cout << rec.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mbinet: binaural speech-intelligibility prediction toolkit"};
  app.require_subcommand(1);

  std::string config_path, resume;
  CLI::App* train = app.add_subcommand("train", "Train a model from a run config");
  train->add_option("--config", config_path, "run config file")->required();
  train->add_option("--resume", resume, "last.ckpt to continue from");

  std::string ckpt, manifest, split_name = "dev", report_path = "eval_report.txt";
  int workers = 1;
  double ratio_override = -1.0;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a manifest split");
  eval->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  eval->add_option("--manifest", manifest, "manifest JSON")->required();
  eval->add_option("--split", split_name, "train or dev (default dev)");
  eval->add_option("--workers", workers, "parallel evaluation workers");
  eval->add_option("--split-ratio", ratio_override,
                   "override the checkpoint's split ratio");
  eval->add_option("--report", report_path, "report output path");

  std::string pr_ckpt, wav_path, listener_arg;
  bool with_frames = false;
  CLI::App* predict = app.add_subcommand("predict", "Score one waveform");
  predict->add_option("--checkpoint", pr_ckpt, "checkpoint file")->required();
  predict->add_option("--wav", wav_path, "input WAV")->required();
  predict->add_option("--listener", listener_arg,
                      "listener JSON (path or inline object)")->required();
  predict->add_flag("--frames", with_frames, "include per-frame merged scores");

  std::string fx_manifest, fx_out;
  int fx_dim = 64;
  std::uint64_t fx_seed = 0;
  CLI::App* fixtures = app.add_subcommand(
      "fixtures", "Write mock-provider embedding fixtures for a manifest");
  fixtures->add_option("--manifest", fx_manifest, "manifest JSON")->required();
  fixtures->add_option("--out", fx_out, "output directory")->required();
  fixtures->add_option("--dim", fx_dim, "embedding dimension");
  fixtures->add_option("--seed", fx_seed, "mock projection seed");

  std::string in_ckpt;
  CLI::App* inspect = app.add_subcommand("inspect", "Describe a checkpoint");
  inspect->add_option("--checkpoint", in_ckpt, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, resume);
    if (eval->parsed())
      return cmd_eval(ckpt, manifest, split_name, workers, ratio_override,
                      report_path);
    if (predict->parsed())
      return cmd_predict(pr_ckpt, wav_path, listener_arg, with_frames);
    if (fixtures->parsed())
      return cmd_fixtures(fx_manifest, fx_out, fx_dim, fx_seed);
    if (inspect->parsed()) return cmd_inspect(in_ckpt);
    std::cerr << app.help() << std::flush;
    return kExitUsage;
  } catch (const mbinet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
