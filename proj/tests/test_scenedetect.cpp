#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "secvos/scenedetect.hpp"

using namespace secvos;

namespace {

// Long-double scalar oracle for the distance.
double bhattacharyya_oracle(const std::vector<double>& p, const std::vector<double>& q) {
    long double coeff = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i)
        coeff += std::sqrt(static_cast<long double>(p[i]) * static_cast<long double>(q[i]));
    const long double d2 = 1.0L - coeff;
    return static_cast<double>(std::sqrt(d2 < 0.0L ? 0.0L : d2));
}

HsHistogram histogram3(std::vector<double> weights) {
    HsHistogram h;
    h.h_bins = static_cast<int>(weights.size());
    h.s_bins = 1;
    h.weights = std::move(weights);
    return h;
}

HsHistogram random_histogram(std::mt19937& rng, int bins) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(bins));
    double sum = 0.0;
    for (double& x : w) {
        x = u(rng);
        sum += x;
    }
    for (double& x : w)
        x /= sum;
    return histogram3(std::move(w));
}

ImageFrame gradient_frame(int w, int h) {
    ImageFrame f;
    f.width = w;
    f.height = h;
    f.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t* px = f.rgb(x, y);
            px[0] = static_cast<std::uint8_t>(x * 255 / std::max(1, w - 1));
            px[1] = static_cast<std::uint8_t>(y * 255 / std::max(1, h - 1));
            px[2] = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
        }
    return f;
}

} // namespace

TEST_CASE("rgb_to_hs known points") {
    const HsPoint red = rgb_to_hs(255, 0, 0);
    CHECK(red.hue == doctest::Approx(0.0));
    CHECK(red.saturation == doctest::Approx(1.0));

    const HsPoint gray = rgb_to_hs(128, 128, 128);
    CHECK(gray.hue == doctest::Approx(0.0));
    CHECK(gray.saturation == doctest::Approx(0.0));

    const HsPoint black = rgb_to_hs(0, 0, 0);
    CHECK(black.saturation == doctest::Approx(0.0));

    // Direct formula evaluation: max = b, hue = 60*((r-g)/delta + 4).
    const HsPoint azure = rgb_to_hs(0, 128, 255);
    CHECK(azure.hue == doctest::Approx(60.0 * (4.0 - 128.0 / 255.0)).epsilon(1e-12));
    CHECK(azure.hue == doctest::Approx(209.88235294117646).epsilon(1e-9));
    CHECK(azure.saturation == doctest::Approx(1.0));
}

TEST_CASE("rgb_to_hs stays in range") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 2000; ++i) {
        const HsPoint hs = rgb_to_hs(byte(rng), byte(rng), byte(rng));
        CHECK(hs.hue >= 0.0);
        CHECK(hs.hue < 360.0);
        CHECK(hs.saturation >= 0.0);
        CHECK(hs.saturation <= 1.0);
    }
}

TEST_CASE("histogram of a uniform red frame concentrates in one bin") {
    const ImageFrame red = ImageFrame::solid(8, 6, {255, 0, 0});
    const HsHistogram h = compute_hs_histogram(red, 32, 32);
    CHECK(h.at(0, 31) == doctest::Approx(1.0));
    double sum = 0.0;
    for (double w : h.weights)
        sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram splits half red half green evenly") {
    ImageFrame f = ImageFrame::solid(8, 8, {255, 0, 0});
    for (int y = 4; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            std::uint8_t* px = f.rgb(x, y);
            px[0] = 0;
            px[1] = 255;
        }
    const HsHistogram h = compute_hs_histogram(f, 32, 32);
    CHECK(h.at(0, 31) == doctest::Approx(0.5));
    // green: hue 120 -> bin floor(120/360*32) = 10
    CHECK(h.at(10, 31) == doctest::Approx(0.5));
}

TEST_CASE("histogram matches a per-pixel binning oracle on a gradient image") {
    const ImageFrame f = gradient_frame(8, 8);
    const int hb = 32, sb = 32;
    const HsHistogram h = compute_hs_histogram(f, hb, sb);

    std::vector<double> expected(static_cast<std::size_t>(hb) * sb, 0.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const std::uint8_t* px = f.rgb(x, y);
            const HsPoint hs = rgb_to_hs(px[0], px[1], px[2]);
            int hbin = std::min(hb - 1, static_cast<int>(hs.hue / 360.0 * hb));
            int sbin = std::min(sb - 1, static_cast<int>(hs.saturation * sb));
            expected[static_cast<std::size_t>(hbin) * sb + sbin] += 1.0 / 64.0;
        }
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(h.weights[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("histogram rejects an empty frame") {
    ImageFrame empty;
    CHECK_THROWS_AS(compute_hs_histogram(empty, 32, 32), EmptyFrameError);
}

TEST_CASE("histogram is invariant to pixel shuffling") {
    std::mt19937 rng(17);
    ImageFrame f = gradient_frame(10, 10);
    const HsHistogram before = compute_hs_histogram(f, 16, 16);

    std::vector<std::array<std::uint8_t, 3>> pixels(100);
    for (int i = 0; i < 100; ++i) {
        const std::uint8_t* px = f.pixels.data() + i * 3;
        pixels[static_cast<std::size_t>(i)] = {px[0], px[1], px[2]};
    }
    std::shuffle(pixels.begin(), pixels.end(), rng);
    for (int i = 0; i < 100; ++i) {
        std::uint8_t* px = f.pixels.data() + i * 3;
        px[0] = pixels[static_cast<std::size_t>(i)][0];
        px[1] = pixels[static_cast<std::size_t>(i)][1];
        px[2] = pixels[static_cast<std::size_t>(i)][2];
    }
    const HsHistogram after = compute_hs_histogram(f, 16, 16);
    for (std::size_t i = 0; i < before.weights.size(); ++i)
        CHECK(before.weights[i] == doctest::Approx(after.weights[i]).epsilon(1e-12));
}

TEST_CASE("bhattacharyya distance basics") {
    const HsHistogram p = histogram3({0.5, 0.5, 0.0});
    CHECK(bhattacharyya_distance(p, p) == doctest::Approx(0.0).epsilon(1e-12));

    const HsHistogram q = histogram3({0.0, 0.0, 1.0});
    const HsHistogram r = histogram3({1.0, 0.0, 0.0});
    CHECK(bhattacharyya_distance(q, r) == doctest::Approx(1.0).epsilon(1e-12));

    const HsHistogram s = histogram3({0.25, 0.25, 0.5});
    const double expected = std::sqrt(1.0 - 2.0 * std::sqrt(0.125));
    CHECK(bhattacharyya_distance(p, s) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bhattacharyya_distance(p, s) == doctest::Approx(0.5411961001461971).epsilon(1e-9));
}

TEST_CASE("bhattacharyya distance validates inputs") {
    HsHistogram p = histogram3({0.5, 0.5});
    HsHistogram q = histogram3({0.5, 0.25, 0.25});
    CHECK_THROWS_AS(bhattacharyya_distance(p, q), GeometryMismatchError);

    HsHistogram bad = histogram3({0.7, 0.7, 0.0});
    HsHistogram ok = histogram3({0.5, 0.25, 0.25});
    CHECK_THROWS_AS(bhattacharyya_distance(bad, ok), NotNormalizedError);
}

TEST_CASE("bhattacharyya matches the long-double oracle on random pairs") {
    std::mt19937 rng(29);
    for (int i = 0; i < 50; ++i) {
        const HsHistogram p = random_histogram(rng, 64);
        const HsHistogram q = random_histogram(rng, 64);
        const double got = bhattacharyya_distance(p, q);
        CHECK(got == doctest::Approx(bhattacharyya_oracle(p.weights, q.weights))
                         .epsilon(1e-10));
        CHECK(got ==
              doctest::Approx(bhattacharyya_distance(q, p)).epsilon(1e-12)); // symmetry
        CHECK(got <= 1.0 + 1e-12);
    }
}

TEST_CASE("detect_change fires on palette swaps only") {
    SceneChangeDetector detector;
    CHECK(detector.config().threshold == 0.35);

    const ImageFrame red = ImageFrame::solid(16, 16, {255, 0, 0});
    const ImageFrame blue = ImageFrame::solid(16, 16, {0, 0, 255});

    CHECK_FALSE(detector.detect_change(red)); // first frame ever
    CHECK_FALSE(detector.detect_change(red)); // identical
    CHECK(detector.detect_change(blue));      // disjoint support: distance 1
    CHECK_FALSE(detector.detect_change(blue));
}

TEST_CASE("detector updates its reference even when a change fires") {
    SceneChangeDetector detector;
    const ImageFrame a = ImageFrame::solid(8, 8, {255, 0, 0});
    const ImageFrame b = ImageFrame::solid(8, 8, {0, 255, 0});
    const ImageFrame c = ImageFrame::solid(8, 8, {0, 0, 255});
    detector.detect_change(a);
    CHECK(detector.detect_change(b));
    CHECK(detector.detect_change(c)); // back-to-back scenes each cut once
}

TEST_CASE("segment_scenes finds planted cuts") {
    std::vector<ImageFrame> constant(30, ImageFrame::solid(16, 12, {10, 200, 50}));
    const SceneList none = segment_scenes(constant);
    CHECK(none.cut_indices.empty());
    CHECK(none.scene_count() == 1);

    std::vector<ImageFrame> video;
    for (int t = 0; t < 90; ++t) {
        std::array<std::uint8_t, 3> color{255, 0, 0};
        if (t >= 30)
            color = {0, 255, 0};
        if (t >= 60)
            color = {0, 0, 255};
        video.push_back(ImageFrame::solid(16, 12, color, t));
    }
    const SceneList cuts = segment_scenes(video);
    CHECK(cuts.cut_indices == std::vector<int>{30, 60});
    CHECK(cuts.scene_count() == 3);

    const SceneList single = segment_scenes({ImageFrame::solid(4, 4, {1, 2, 3})});
    CHECK(single.scene_count() == 1);

    CHECK_THROWS_AS(segment_scenes({}), EmptySequenceError);
}

TEST_CASE("lowering the threshold never removes cuts") {
    std::mt19937 rng(43);
    std::vector<ImageFrame> video;
    std::uniform_int_distribution<int> byte(0, 255);
    for (int t = 0; t < 40; ++t) {
        std::array<std::uint8_t, 3> color{static_cast<std::uint8_t>(byte(rng)),
                                          static_cast<std::uint8_t>(byte(rng)),
                                          static_cast<std::uint8_t>(byte(rng))};
        // hold each color for a few frames
        for (int k = 0; k < 3 && static_cast<int>(video.size()) < 40; ++k)
            video.push_back(
                ImageFrame::solid(12, 10, color, static_cast<int>(video.size())));
    }
    std::size_t prev_cuts = 0;
    for (double threshold : {0.9, 0.6, 0.35, 0.1, 0.01}) {
        const SceneList scenes = segment_scenes(video, {threshold, 32, 32});
        CHECK(scenes.cut_indices.size() >= prev_cuts);
        prev_cuts = scenes.cut_indices.size();
    }
}
