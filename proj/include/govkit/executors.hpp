#pragma once

// Model executors used for replay. Real provider clients are out of scope;
// these mocks reproduce the determinism classes the verifier reasons about.

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "govkit/certificates.hpp"

namespace govkit::repro {

using Config = std::map<std::string, std::string>;

class ModelExecutor {
 public:
  virtual ~ModelExecutor() = default;
  virtual std::string execute(ByteView input, std::uint64_t seed, const Config& config) = 0;
  virtual cert::ReproLevel determinism() const = 0;
  virtual const cert::ModelBinding& model() const = 0;
};

// Bit-identical output for equal (model, input, seed, config): lowercase
// words drawn from a fixed vocabulary by a SHA-256 stream.
class DeterministicExecutor : public ModelExecutor {
 public:
  explicit DeterministicExecutor(cert::ModelBinding model, std::size_t words = 48);
  std::string execute(ByteView input, std::uint64_t seed, const Config& config) override;
  cert::ReproLevel determinism() const override { return cert::ReproLevel::full; }
  const cert::ModelBinding& model() const override { return model_; }

 private:
  cert::ModelBinding model_;
  std::size_t words_;
};

// Wraps an executor and perturbs each word with probability `rate` by
// rewriting one character in place, so lengths and word boundaries survive.
// Successive calls draw fresh noise, emulating sampling nondeterminism.
class ParaphraseNoiseExecutor : public ModelExecutor {
 public:
  ParaphraseNoiseExecutor(std::shared_ptr<ModelExecutor> inner, double rate, std::uint64_t noise_seed);
  std::string execute(ByteView input, std::uint64_t seed, const Config& config) override;
  cert::ReproLevel determinism() const override { return cert::ReproLevel::statistical; }
  const cert::ModelBinding& model() const override { return inner_->model(); }

 private:
  std::shared_ptr<ModelExecutor> inner_;
  double rate_;
  std::uint64_t noise_seed_;
  std::uint64_t calls_ = 0;
};

// Substitute model presenting the honest model's binding. On the fraction
// `divergence` of inputs selected by a keyed hash it emits uppercase and digit
// text with no spaces, which shares no position with honest lowercase output;
// elsewhere it answers exactly like the honest executor.
class AdversarialExecutor : public ModelExecutor {
 public:
  AdversarialExecutor(std::shared_ptr<ModelExecutor> honest, double divergence, std::uint64_t salt);
  std::string execute(ByteView input, std::uint64_t seed, const Config& config) override;
  cert::ReproLevel determinism() const override { return honest_->determinism(); }
  const cert::ModelBinding& model() const override { return honest_->model(); }

  // Whether this adversary diverges on `input`.
  bool diverges_on(ByteView input) const;

 private:
  std::shared_ptr<ModelExecutor> honest_;
  double divergence_;
  std::uint64_t salt_;
};

// Substitute text the adversary emits for `input`; exposed for tests.
std::string adversarial_text(ByteView input, std::size_t length, std::uint64_t salt);

}  // namespace govkit::repro
