#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rppg/sigproc.hpp"

using namespace rppg::sigproc;

namespace {

Signal tone(double freq_hz, double fs, std::size_t n, double amp = 1.0,
            double phase = 0.0) {
    Signal s{std::vector<double>(n), fs};
    for (std::size_t i = 0; i < n; ++i)
        s.samples[i] =
            amp * std::cos(2.0 * M_PI * freq_hz * static_cast<double>(i) / fs +
                           phase);
    return s;
}

double rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace

TEST_CASE("bandpass keeps in-band tones and removes out-of-band tones") {
    const Signal in_band = tone(1.5, 20.0, 600);
    const Signal kept = bandpass(in_band);
    CHECK(rms(kept.samples) ==
          doctest::Approx(rms(in_band.samples)).epsilon(0.01));

    const Signal low = tone(0.3, 20.0, 600);
    const Signal removed = bandpass(low);
    CHECK(rms(removed.samples) < 0.01 * rms(low.samples));
}

TEST_CASE("bandpass is idempotent to 1e-9") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Signal x{std::vector<double>(512), 20.0};
    for (double& v : x.samples) v = g(rng);
    const Signal once = bandpass(x);
    const Signal twice = bandpass(once);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(std::abs(once.samples[i] - twice.samples[i]) < 1e-9);
}

TEST_CASE("bandpass validates its arguments") {
    const Signal x = tone(1.0, 20.0, 64);
    CHECK_THROWS_AS(bandpass(x, 3.0, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(bandpass(x, 0.7, 10.0), std::invalid_argument); // Nyquist
    Signal bad = x;
    bad.samples[3] = std::nan("");
    CHECK_THROWS_AS(bandpass(bad), std::invalid_argument);
}

TEST_CASE("hilbert phase shift identities at 0, 90 and 180 degrees") {
    const std::size_t n = 600;
    const Signal x = tone(1.2, 20.0, n); // zero-mean cosine

    const Signal same = hilbert_phase_shift(x, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(same.samples[i] - x.samples[i]) < 1e-9);

    const Signal neg = hilbert_phase_shift(x, 180.0);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(neg.samples[i] + x.samples[i]) < 1e-9);

    const Signal quarter = hilbert_phase_shift(x, 90.0);
    const Signal want = tone(1.2, 20.0, n, 1.0, -M_PI / 2.0);
    const std::size_t guard = n / 20; // skip 5% edges
    for (std::size_t i = guard; i < n - guard; ++i)
        CHECK(std::abs(quarter.samples[i] - want.samples[i]) < 1e-3);
}

TEST_CASE("differentiate: constant, ramp, and spectral-peak preservation") {
    Signal c{std::vector<double>(32, 4.2), 20.0};
    const Signal dc = differentiate(c);
    REQUIRE(dc.size() == 31);
    for (double v : dc.samples) CHECK(v == 0.0);

    Signal ramp{std::vector<double>(64), 20.0};
    for (std::size_t i = 0; i < 64; ++i)
        ramp.samples[i] = 0.25 * static_cast<double>(i);
    for (double v : differentiate(ramp).samples)
        CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    const Signal s = tone(1.2, 20.0, 600);
    const RateTrace rs = rate_trace(s);
    const RateTrace rd = rate_trace(differentiate(s));
    for (std::size_t i = 0; i < rd.rates.size(); ++i)
        CHECK(std::abs(rd.rates[i] - rs.rates[i]) < 0.6);
}

TEST_CASE("zscore: idempotence, constants, unit moments") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(2.0, 3.0);
    Signal x{std::vector<double>(500), 20.0};
    for (double& v : x.samples) v = g(rng);

    const Signal z = zscore(x);
    CHECK(std::abs(mean(z.samples)) < 1e-12);
    double var = 0.0;
    for (double v : z.samples) var += v * v;
    var /= static_cast<double>(z.size());
    CHECK(std::abs(var - 1.0) < 1e-12);

    const Signal zz = zscore(z);
    for (std::size_t i = 0; i < z.size(); ++i)
        CHECK(zz.samples[i] == doctest::Approx(z.samples[i]).epsilon(1e-12));

    Signal c{std::vector<double>(16, 7.0), 20.0};
    for (double v : zscore(c).samples) CHECK(v == 0.0);
}

TEST_CASE("resample_linear: identity, ramps, 60 to 20 Hz tone") {
    const Signal x = tone(1.0, 60.0, 181);
    const Signal same = resample_linear(x, 60.0);
    REQUIRE(same.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(same.samples[i] == x.samples[i]);

    Signal ramp{std::vector<double>(61), 60.0};
    for (std::size_t i = 0; i < 61; ++i)
        ramp.samples[i] = static_cast<double>(i);
    const Signal down = resample_linear(ramp, 20.0);
    REQUIRE(down.size() == 21);
    for (std::size_t i = 0; i < down.size(); ++i)
        CHECK(down.samples[i] ==
              doctest::Approx(3.0 * static_cast<double>(i)).epsilon(1e-12));

    const Signal slow = resample_linear(x, 20.0);
    for (std::size_t i = 0; i < slow.size(); ++i) {
        const double t = static_cast<double>(i) / 20.0;
        CHECK(std::abs(slow.samples[i] - std::cos(2.0 * M_PI * t)) < 0.02);
    }
    CHECK_THROWS_AS(resample_linear(x, 0.0), std::invalid_argument);
}

TEST_CASE("rate_trace on a pure 1.2 Hz tone reads 72 bpm in every window") {
    const Signal x = tone(1.2, 20.0, 600);
    const RateTrace rt = rate_trace(x);
    REQUIRE(rt.rates.size() == 600 - kRateWindow + 1);
    for (double r : rt.rates) CHECK(std::abs(r - 72.0) < 0.6);
    for (double c : rt.confidence) CHECK(c > 10.0);
}

TEST_CASE("rate_trace picks the dominant of two tones") {
    Signal x = tone(1.2, 20.0, 600);
    const Signal weak = tone(2.0, 20.0, 600, 0.3);
    for (std::size_t i = 0; i < x.size(); ++i)
        x.samples[i] += weak.samples[i];
    for (double r : rate_trace(x).rates) CHECK(std::abs(r - 72.0) < 0.6);
}

TEST_CASE("rate_trace clamps out-of-range tones and lowers confidence") {
    const Signal oob = tone(0.5, 20.0, 600); // 30 bpm, below range
    const RateTrace rt = rate_trace(oob);
    for (double r : rt.rates) CHECK(r >= kRateLoBpm);

    const RateTrace in_band = rate_trace(tone(1.2, 20.0, 600));
    CHECK(mean(rt.confidence) < 0.5 * mean(in_band.confidence));

    CHECK_THROWS_AS(rate_trace(tone(1.0, 20.0, 100)), std::invalid_argument);
}

TEST_CASE("rmse: zero, constant offset, loop oracle") {
    RateTrace a, b;
    a.fs = b.fs = 20.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(60.0, 90.0);
    for (int i = 0; i < 40; ++i) {
        const double v = u(rng);
        a.rates.push_back(v);
        b.rates.push_back(v);
    }
    CHECK(rmse(a, a) == 0.0);

    RateTrace shifted = a;
    for (double& r : shifted.rates) r += 3.0;
    CHECK(rmse(a, shifted) == doctest::Approx(3.0).epsilon(1e-12));

    RateTrace noisy = a;
    std::normal_distribution<double> g(0.0, 2.0);
    for (double& r : noisy.rates) r += g(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rates.size(); ++i) {
        const double d = a.rates[i] - noisy.rates[i];
        acc += d * d;
    }
    CHECK(rmse(a, noisy) ==
          doctest::Approx(std::sqrt(acc / static_cast<double>(a.rates.size())))
              .epsilon(1e-12));

    RateTrace shorter = a;
    shorter.rates.pop_back();
    CHECK_THROWS_AS(rmse(a, shorter), std::invalid_argument);
}

TEST_CASE("accuracy: identical, offsets, half-and-half, strict threshold") {
    RateTrace a;
    a.fs = 20.0;
    for (int i = 0; i < 10; ++i) a.rates.push_back(70.0);
    CHECK(accuracy(a, a) == 100.0);

    RateTrace off5 = a;
    for (double& r : off5.rates) r += 5.0;
    CHECK(accuracy(a, off5) == 0.0);

    RateTrace off3 = a;
    for (double& r : off3.rates) r += 3.0; // |err| == 3 does not count
    CHECK(accuracy(a, off3) == 0.0);

    RateTrace half = a;
    for (std::size_t i = 0; i < 5; ++i) half.rates[i] += 10.0;
    CHECK(accuracy(a, half) == 50.0);
}
