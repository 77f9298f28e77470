#pragma once

// Bernoulli sample sources with an exact draw counter, geometric and
// negative-binomial extraction from the stream, and gamma variate generation.
// Randomness comes from a splittable generator: every (master_seed, stream,
// lane) triple is an independent reproducible substream, so harness
// replicates are identical no matter how they are scheduled across threads.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ras {

// xoshiro256++ seeded through splitmix64 from (master_seed, stream, lane).
class RngStream {
  public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0,
                       std::uint64_t lane = 0);

    std::uint64_t next_u64();
    double next_uniform01(); // in [0, 1)
    double next_normal();    // standard normal (polar method)

  private:
    std::uint64_t s_[4];
};

struct StreamExhausted : std::runtime_error {
    explicit StreamExhausted(std::uint64_t consumed)
        : std::runtime_error("Bernoulli stream exhausted after " +
                             std::to_string(consumed) + " draws"),
          draws_consumed(consumed) {}
    std::uint64_t draws_consumed;
};

struct BitFileFormatError : std::runtime_error {
    BitFileFormatError(const std::string& path, std::uint64_t offset)
        : std::runtime_error("invalid byte at offset " + std::to_string(offset) +
                             " in bit file " + path),
          byte_offset(offset) {}
    std::uint64_t byte_offset;
};

// A consumable stream of Bernoulli outcomes. Single consumer; distinct
// sources are fully independent.
class SampleSource {
  public:
    virtual ~SampleSource() = default;
    virtual bool next_bernoulli() = 0;
    std::uint64_t draws_consumed() const { return draws_; }

  protected:
    std::uint64_t draws_ = 0;
};

// B_i = 1(U_i < p) over the substream's uniforms.
class SimulatedSource final : public SampleSource {
  public:
    SimulatedSource(double p, RngStream rng);
    bool next_bernoulli() override;
    double p() const { return p_; }

  private:
    double p_;
    RngStream rng_;
};

class InMemorySource final : public SampleSource {
  public:
    explicit InMemorySource(std::vector<std::uint8_t> bits);
    bool next_bernoulli() override;

  private:
    std::vector<std::uint8_t> bits_;
    std::size_t pos_ = 0;
};

// ASCII '0'/'1' characters; whitespace ignored; anything else is a format
// error reported with its byte offset.
class FileBackedSource final : public SampleSource {
  public:
    explicit FileBackedSource(const std::string& path);
    bool next_bernoulli() override;

  private:
    std::vector<std::uint8_t> bits_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> parse_bit_stream(const std::string& text,
                                           const std::string& origin);

// Index of the first success among freshly consumed bits (Geo(p) for a
// simulated source); consumes exactly that many bits.
std::uint64_t draw_geometric(SampleSource& source);

// Sum of k geometric draws == total bits consumed during the call.
std::uint64_t draw_negbin_trials(SampleSource& source, std::uint64_t k);

// Gamma(shape, 1) variate; Marsaglia-Tsang squeeze for shape >= 1, boosted
// below 1.
double draw_gamma(double shape, RngStream& rng);

// Exact sum-of-exponentials path for integer shape (test cross-validation).
double draw_gamma_integer_sum(unsigned shape, RngStream& rng);

} // namespace ras
