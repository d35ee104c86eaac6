#include "asdal/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "asdal/random.hpp"

namespace asdal {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(Vec& v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
}

Vec gaussian(std::size_t dim, Rng& rng) {
  Vec v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

// Random unit vector orthogonal to every vector in `basis` (assumed
// orthonormal). Needs dim > basis.size().
Vec orthogonal_direction(const std::vector<Vec>& basis, std::size_t dim, Rng& rng) {
  Vec v = gaussian(dim, rng);
  for (const Vec& b : basis) {
    const double p = dot(v, b);
    for (std::size_t i = 0; i < dim; ++i) v[i] -= p * b[i];
  }
  normalize(v);
  return v;
}

Vec offset(const Vec& center, const Vec& direction, double magnitude) {
  Vec out = center;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += magnitude * direction[i];
  return out;
}

Embedding draw(const Vec& center, double sigma, Rng& rng) {
  Vec v = center;
  for (double& x : v) x += sigma * rng.normal();
  normalize(v);
  return Embedding(std::move(v));
}

std::string numbered(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError("synth: dim must be positive");
  if (cfg.machines == 0) throw ConfigError("synth: machines must be positive");
  if (cfg.source_train == 0 || cfg.target_train == 0 || cfg.test_normal_source == 0 ||
      cfg.test_normal_target == 0 || cfg.test_anomalous == 0) {
    throw ConfigError("synth: every sample count must be at least 1");
  }
  if (cfg.anomaly_clusters < 2) throw ConfigError("synth: need at least two anomaly clusters");
  // Source, target, unseen, fault and one direction per anomaly cluster must be
  // mutually orthogonal.
  if (cfg.dim < cfg.anomaly_clusters + 4) {
    throw ConfigError("synth: dim too small for the requested cluster directions");
  }
  if (!(cfg.spread > 0.0)) throw ConfigError("synth: spread must be positive");
  if (!(cfg.target_shift >= 0.0)) throw ConfigError("synth: target_shift must be non-negative");
  if (!(cfg.anomaly_shift > cfg.target_shift)) {
    throw ConfigError("synth: anomaly_shift must exceed target_shift");
  }
  if (!(cfg.unseen_shift > 0.0)) throw ConfigError("synth: unseen_shift must be positive");
  if (!(cfg.anomaly_coherence >= 0.0 && cfg.anomaly_coherence < 1.0)) {
    throw ConfigError("synth: anomaly_coherence must lie in [0, 1)");
  }
}

SynthDataset generate(const SynthConfig& cfg) {
  validate(cfg);
  SynthDataset out;
  const double sigma = cfg.spread / std::sqrt(static_cast<double>(cfg.dim));

  for (std::size_t m = 0; m < cfg.machines; ++m) {
    const std::string machine = numbered("machine", m, 2);
    Rng rng(SeedHasher(cfg.seed).add("synth").add(static_cast<std::uint64_t>(m)).finish());

    Vec source = gaussian(cfg.dim, rng);
    normalize(source);
    std::vector<Vec> basis{source};
    const Vec target_dir = orthogonal_direction(basis, cfg.dim, rng);
    basis.push_back(target_dir);
    const Vec unseen_dir = orthogonal_direction(basis, cfg.dim, rng);
    basis.push_back(unseen_dir);

    const Vec target = offset(source, target_dir, cfg.target_shift);
    const Vec unseen = offset(source, unseen_dir, cfg.unseen_shift);
    const Vec fault_dir = orthogonal_direction(basis, cfg.dim, rng);
    basis.push_back(fault_dir);

    const double shared = std::sqrt(cfg.anomaly_coherence);
    const double own = std::sqrt(1.0 - cfg.anomaly_coherence);
    std::vector<Vec> anomaly_centers;
    for (std::size_t c = 0; c < cfg.anomaly_clusters; ++c) {
      Vec mode = orthogonal_direction(basis, cfg.dim, rng);
      basis.push_back(mode);
      if (c == 0) {
        // Leans toward the target cluster: hard to tell from target normals.
        for (std::size_t i = 0; i < cfg.dim; ++i) mode[i] += target_dir[i];
        normalize(mode);
      }
      Vec dir(cfg.dim);
      for (std::size_t i = 0; i < cfg.dim; ++i) dir[i] = shared * fault_dir[i] + own * mode[i];
      normalize(dir);
      anomaly_centers.push_back(offset(source, dir, cfg.anomaly_shift));
    }

    auto emit = [&](std::vector<Sample>& dst, const std::string& id, Domain domain, Label label,
                    const Vec& center) {
      dst.push_back(Sample{id, machine, domain, label, draw(center, sigma, rng)});
    };

    const std::string train_prefix = machine + "_train_";
    std::size_t idx = 0;
    for (std::size_t i = 0; i < cfg.source_train; ++i) {
      emit(out.train, numbered(train_prefix, idx++, 5), Domain::Source, Label::Normal, source);
    }
    for (std::size_t i = 0; i < cfg.target_train; ++i) {
      emit(out.train, numbered(train_prefix, idx++, 5), Domain::Target, Label::Normal, target);
    }

    const std::string test_prefix = machine + "_test_";
    idx = 0;
    for (std::size_t i = 0; i < cfg.test_normal_source; ++i) {
      emit(out.test, numbered(test_prefix, idx++, 5), Domain::Source, Label::Normal, source);
    }
    for (std::size_t i = 0; i < cfg.test_normal_unseen; ++i) {
      emit(out.test, numbered(test_prefix, idx++, 5), Domain::Source, Label::Normal, unseen);
    }
    for (std::size_t i = 0; i < cfg.test_normal_target; ++i) {
      emit(out.test, numbered(test_prefix, idx++, 5), Domain::Target, Label::Normal, target);
    }
    for (std::size_t i = 0; i < cfg.test_anomalous; ++i) {
      // Alternate source/target domain so both splits see every anomaly mode.
      const Domain domain = i % 2 == 0 ? Domain::Source : Domain::Target;
      emit(out.test, numbered(test_prefix, idx++, 5), domain, Label::Anomalous,
           anomaly_centers[i % anomaly_centers.size()]);
    }
  }
  return out;
}

}  // namespace asdal
