#include "ras/sampling.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ras {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream,
                     std::uint64_t lane) {
    std::uint64_t mix = master_seed;
    (void)splitmix64(mix);
    mix ^= splitmix64(mix) + stream * 0xD6E8FEB86659FD93ULL;
    mix ^= splitmix64(mix) + lane * 0xCA5A826395121157ULL;
    for (auto& word : s_)
        word = splitmix64(mix);
    // xoshiro256++ state must not be all zero; splitmix64 output never is for
    // all four words at once, but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
        s_[0] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::next_uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
    // Marsaglia polar; the spare deviate is discarded so each call consumes a
    // deterministic prefix of the stream.
    while (true) {
        const double u = 2.0 * next_uniform01() - 1.0;
        const double v = 2.0 * next_uniform01() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0)
            return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

SimulatedSource::SimulatedSource(double p, RngStream rng) : p_(p), rng_(rng) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("SimulatedSource requires p in [0, 1]");
}

bool SimulatedSource::next_bernoulli() {
    ++draws_;
    return rng_.next_uniform01() < p_;
}

InMemorySource::InMemorySource(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {}

bool InMemorySource::next_bernoulli() {
    if (pos_ >= bits_.size())
        throw StreamExhausted(draws_);
    ++draws_;
    return bits_[pos_++] != 0;
}

std::vector<std::uint8_t> parse_bit_stream(const std::string& text,
                                           const std::string& origin) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '0') {
            bits.push_back(0);
        } else if (ch == '1') {
            bits.push_back(1);
        } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' ||
                   ch == '\v' || ch == '\f') {
            continue;
        } else {
            throw BitFileFormatError(origin, i);
        }
    }
    return bits;
}

FileBackedSource::FileBackedSource(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open bit file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    bits_ = parse_bit_stream(buf.str(), path);
}

bool FileBackedSource::next_bernoulli() {
    if (pos_ >= bits_.size())
        throw StreamExhausted(draws_);
    ++draws_;
    return bits_[pos_++] != 0;
}

std::uint64_t draw_geometric(SampleSource& source) {
    std::uint64_t count = 0;
    while (true) {
        ++count;
        if (source.next_bernoulli())
            return count;
    }
}

std::uint64_t draw_negbin_trials(SampleSource& source, std::uint64_t k) {
    if (k < 1)
        throw std::domain_error("draw_negbin_trials requires k >= 1");
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < k; ++i)
        total += draw_geometric(source);
    return total;
}

namespace {

// U = 0 is remapped to the smallest positive double before any log or
// quantile transform.
double positive_uniform(RngStream& rng) {
    const double u = rng.next_uniform01();
    return u > 0.0 ? u : std::numeric_limits<double>::denorm_min();
}

} // namespace

double draw_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0))
        throw std::domain_error("draw_gamma requires shape > 0");
    if (shape < 1.0) {
        const double boost = std::pow(positive_uniform(rng), 1.0 / shape);
        return draw_gamma(shape + 1.0, rng) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    while (true) {
        double x;
        double v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = positive_uniform(rng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

double draw_gamma_integer_sum(unsigned shape, RngStream& rng) {
    if (shape == 0 || shape > 64)
        throw std::domain_error("draw_gamma_integer_sum requires 1 <= shape <= 64");
    double total = 0.0;
    for (unsigned i = 0; i < shape; ++i)
        total += -std::log1p(-positive_uniform(rng));
    return total;
}

} // namespace ras
