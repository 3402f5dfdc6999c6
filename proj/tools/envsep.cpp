// Copyright 2026 The envsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// envsep command line: separate | mix | eval | sweep.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "envsep/harness.hpp"
#include "envsep/keyval.hpp"
#include "envsep/metrics.hpp"
#include "envsep/separation.hpp"

namespace fs = std::filesystem;
using namespace envsep;

namespace {

struct ConfigFlags {
  int bases = 40;
  int lpc_order = 4;
  int iters = 100;
  int frame_size = 4096;
  int hop_size = 1024;
  std::string init = "normal";
  double p = 5.0;
  double alpha_step = 0.01;
  double alpha_fixed = -1.0;  // < 0 means "use the ramp"
  double beta = 0.0;
  std::string recon = "soft_mask";
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--bases", bases, "Bases per instrument");
    cmd->add_option("--lpc-order", lpc_order, "LPC order M");
    cmd->add_option("--iters", iters, "NMF iterations");
    cmd->add_option("--frame", frame_size, "STFT frame size");
    cmd->add_option("--hop", hop_size, "STFT hop size");
    cmd->add_option("--init", init, "Basis init: normal|sparse");
    cmd->add_option("--p", p, "Blind envelope weight exponent");
    cmd->add_option("--alpha-step", alpha_step, "Informed alpha ramp step");
    cmd->add_option("--alpha-fixed", alpha_fixed,
                    "Fix alpha (1 = unconstrained baseline)");
    cmd->add_option("--beta", beta, "Blind mixing weight");
    cmd->add_option("--recon", recon, "Phase mode: direct|soft_mask");
    cmd->add_option("--seed", seed, "RNG seed");
  }

  SeparationConfig to_config(double sample_rate) const {
    SeparationConfig config;
    config.sample_rate = sample_rate;
    config.frame_size = frame_size;
    config.hop_size = hop_size;
    config.iterations = iters;
    config.bases_per_instrument = bases;
    config.lpc_order = lpc_order;
    config.init_mode = init_mode_from_string(init);
    config.schedule.alpha_step = alpha_step;
    if (alpha_fixed >= 0.0) config.schedule.alpha_fixed = alpha_fixed;
    config.schedule.beta = beta;
    config.schedule.weight_exponent = p;
    config.reconstruction_mode = reconstruction_mode_from_string(recon);
    config.seed = seed;
    return config;
  }
};

std::vector<AudioSignal> load_instrument_clips(const fs::path& dir) {
  // one subdirectory per instrument; clips of one instrument concatenate
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) subdirs.push_back(entry.path());
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty())
    throw std::runtime_error("separate: no instrument subdirectories in " +
                             dir.string());

  std::vector<AudioSignal> clips;
  for (const auto& sub : subdirs) {
    std::vector<fs::path> wavs;
    for (const auto& entry : fs::directory_iterator(sub))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        wavs.push_back(entry.path());
    std::sort(wavs.begin(), wavs.end());
    if (wavs.empty())
      throw std::runtime_error("separate: no WAVs in " + sub.string());
    AudioSignal cat;
    for (const auto& w : wavs) {
      AudioSignal clip = read_wav(w.string());
      if (cat.samples.empty())
        cat.sample_rate = clip.sample_rate;
      else if (cat.sample_rate != clip.sample_rate)
        throw std::runtime_error("separate: clip sample rates differ in " +
                                 sub.string());
      cat.samples.insert(cat.samples.end(), clip.samples.begin(),
                         clip.samples.end());
    }
    clips.push_back(std::move(cat));
  }
  return clips;
}

int cmd_separate(const std::string& mode, const std::string& mixture_path,
                 const std::string& clips_dir, int instruments,
                 const std::string& out_dir, const ConfigFlags& flags) {
  const AudioSignal mixture = read_wav(mixture_path);
  const SeparationConfig config = flags.to_config(mixture.sample_rate);

  SeparationResult result;
  if (mode == "informed") {
    if (clips_dir.empty())
      throw std::runtime_error("separate: informed mode needs --clips");
    const auto clips = load_instrument_clips(clips_dir);
    if (instruments > 0 && instruments != static_cast<int>(clips.size()))
      throw std::runtime_error(
          "separate: --instruments disagrees with the clip directory");
    result = separate_informed(mixture, clips, config);
  } else if (mode == "blind") {
    result = separate_blind(mixture, instruments, config);
  } else if (mode == "baseline") {
    SeparationConfig plain = config;
    plain.schedule.beta = 1.0;
    result = separate_blind(mixture, instruments, plain);
  } else {
    throw std::runtime_error("separate: unknown --mode " + mode);
  }

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < result.sources.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "source_%02zu.wav", i);
    write_wav((fs::path(out_dir) / name).string(), result.sources[i]);
  }
  std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
  write_run_manifest(manifest, result, mode);
  std::cout << "wrote " << result.sources.size() << " sources to " << out_dir
            << "\n";
  return 0;
}

int cmd_mix(const std::string& spec_path, const std::string& out_dir) {
  const harness::MixtureSpec spec = harness::load_mixture_spec(spec_path);
  const harness::GeneratedMixture generated = harness::generate_mixture(spec);

  fs::create_directories(out_dir);
  write_wav((fs::path(out_dir) / "mixture.wav").string(), generated.mixture);
  for (std::size_t i = 0; i < generated.ground_truth.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "source_%02zu.wav", i);
    write_wav((fs::path(out_dir) / name).string(), generated.ground_truth[i]);
  }
  std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
  manifest << "duration=" << spec.duration << "\n"
           << "notes_per_instrument=" << spec.notes_per_instrument << "\n"
           << "sample_rate=" << spec.sample_rate << "\n"
           << "seed=" << spec.seed << "\n";
  for (std::size_t i = 0; i < generated.names.size(); ++i)
    manifest << "instrument=" << generated.names[i] << "\n";
  std::cout << "wrote mixture + " << generated.ground_truth.size()
            << " ground-truth tracks to " << out_dir << "\n";
  return 0;
}

std::vector<AudioSignal> load_wav_dir(const fs::path& dir,
                                      std::vector<std::string>* names) {
  std::vector<fs::path> wavs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      wavs.push_back(entry.path());
  std::sort(wavs.begin(), wavs.end());
  std::vector<AudioSignal> signals;
  for (const auto& w : wavs) {
    if (names) names->push_back(w.filename().string());
    signals.push_back(read_wav(w.string()));
  }
  return signals;
}

int cmd_eval(const std::string& est_dir, const std::string& ref_dir,
             const std::string& out_csv) {
  std::vector<AudioSignal> estimates = load_wav_dir(est_dir, nullptr);
  std::vector<std::string> ref_names;
  std::vector<AudioSignal> references = load_wav_dir(ref_dir, &ref_names);
  // ignore a mixture.wav sitting next to reference tracks
  for (std::size_t i = ref_names.size(); i-- > 0;) {
    if (ref_names[i] == "mixture.wav") {
      references.erase(references.begin() + static_cast<std::ptrdiff_t>(i));
      ref_names.erase(ref_names.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  if (estimates.empty() || estimates.size() != references.size())
    throw std::runtime_error("eval: estimate/reference WAV counts differ");

  const auto report = metrics::evaluate_permuted(estimates, references);
  std::ofstream out(out_csv);
  metrics::write_csv(out, report);
  std::cout << "wrote " << out_csv << "\n";
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_csv,
              const ConfigFlags& flags) {
  SeparationConfig base = flags.to_config(44100.0);
  const harness::SweepSpec sweep = harness::load_sweep_spec(spec_path, &base);
  std::ofstream out(out_csv);
  harness::run_sweep(sweep, base, sweep.mixtures, out);
  std::cout << "wrote " << out_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instrument sound separation via envelope-constrained KL-NMF"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags override it");

  // separate
  auto* separate = app.add_subcommand("separate", "Separate a mixture WAV");
  std::string mode = "blind", mixture_path, clips_dir, out_dir = "out";
  int instruments = 2;
  separate->add_option("--mode", mode, "informed|blind|baseline");
  separate->add_option("--mixture", mixture_path, "Input mixture WAV")
      ->required();
  separate->add_option("--clips", clips_dir,
                       "Directory with one subdirectory of WAV note clips per "
                       "instrument (informed mode)");
  separate->add_option("--instruments", instruments, "Number of instruments");
  separate->add_option("--out", out_dir, "Output directory");
  ConfigFlags sep_flags;
  sep_flags.add_to(separate);

  // mix
  auto* mix = app.add_subcommand("mix", "Generate a mixture from a spec file");
  std::string mix_spec, mix_out = "mix_out";
  mix->add_option("--spec", mix_spec, "Mixture spec (key=value)")->required();
  mix->add_option("--out", mix_out, "Output directory");

  // eval
  auto* eval = app.add_subcommand("eval", "BSS metrics for estimates vs refs");
  std::string est_dir, ref_dir, eval_out = "report.csv";
  eval->add_option("--est", est_dir, "Directory of estimate WAVs")->required();
  eval->add_option("--ref", ref_dir, "Directory of reference WAVs")->required();
  eval->add_option("--out", eval_out, "Output CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  std::string sweep_spec, sweep_out = "sweep.csv";
  sweep->add_option("--spec", sweep_spec, "Sweep spec (key=value)")->required();
  sweep->add_option("--out", sweep_out, "Output CSV");
  ConfigFlags sweep_flags;
  sweep_flags.add_to(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (separate->parsed())
      return cmd_separate(mode, mixture_path, clips_dir, instruments, out_dir,
                          sep_flags);
    if (mix->parsed()) return cmd_mix(mix_spec, mix_out);
    if (eval->parsed()) return cmd_eval(est_dir, ref_dir, eval_out);
    if (sweep->parsed()) return cmd_sweep(sweep_spec, sweep_out, sweep_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
