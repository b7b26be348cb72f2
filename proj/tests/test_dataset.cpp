#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "secvos/dataset.hpp"
#include "secvos/image_io.hpp"
#include "secvos/scenedetect.hpp"
#include "support/fixtures.hpp"

using namespace secvos;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::vector<std::uint8_t> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

SyntheticSpec tiny_spec() {
    SyntheticSpec spec;
    spec.width = 24;
    spec.height = 18;
    spec.frame_count = 3;
    spec.segment_colors = {{0, 180, 180}};
    spec.objects.push_back(fixtures::static_object(1, 3, 2, 2, 5, 4, {255, 0, 0}));
    spec.objects.push_back(fixtures::static_object(2, 3, 12, 8, 6, 5, {255, 255, 0}));
    return spec;
}

} // namespace

TEST_CASE("png round-trips rgb frames and indexed annotations") {
    TempDir tmp("secvos-io");
    ImageFrame frame = ImageFrame::solid(9, 7, {10, 200, 60});
    frame.rgb(3, 2)[0] = 255;
    write_png_rgb((tmp.path / "f.png").string(), frame);
    const ImageFrame back = read_image_rgb((tmp.path / "f.png").string());
    CHECK(back.width == 9);
    CHECK(back.height == 7);
    CHECK(back.pixels == frame.pixels);

    IndexedImage img;
    img.width = 6;
    img.height = 5;
    img.indices.assign(30, 0);
    img.indices[7] = 1;
    img.indices[8] = 2;
    img.palette = vos_palette();
    write_png_indexed((tmp.path / "a.png").string(), img);
    const IndexedImage iback = read_png_indexed((tmp.path / "a.png").string());
    CHECK(iback.indices == img.indices);
    CHECK(iback.palette.size() == 256);
}

TEST_CASE("in-memory png encoding matches the file encoder") {
    TempDir tmp("secvos-io");
    const ImageFrame frame = ImageFrame::solid(16, 12, {1, 2, 3});
    write_png_rgb((tmp.path / "f.png").string(), frame);
    CHECK(encode_png_rgb(frame) == slurp(tmp.path / "f.png"));
}

TEST_CASE("static synthetic specs render constant ground truth") {
    const RenderedVideo video = render_synthetic(tiny_spec());
    REQUIRE(video.frames.size() == 3);
    REQUIRE(video.gt.at(1).size() == 3);
    CHECK(video.gt.at(1)[0] == video.gt.at(1)[2]);
    CHECK(video.gt.at(2)[0] == BinaryMask::filled_rect(24, 18, 12, 8, 6, 5));
    CHECK(video.frames[0].pixels == video.frames[2].pixels);
}

TEST_CASE("planted cuts are recovered by the detector") {
    const SyntheticSpec spec = fixtures::one_cut_video();
    const RenderedVideo video = render_synthetic(spec);
    const SceneList scenes = segment_scenes(video.frames);
    CHECK(scenes.cut_indices == spec.cut_indices);
}

TEST_CASE("out-of-bounds trajectories are rejected") {
    SyntheticSpec spec = tiny_spec();
    spec.objects[0].states[1] = RectState{22, 2, 5, 4, {255, 0, 0}, {}, 0.0};
    CHECK_THROWS_AS(render_synthetic(spec), OutOfBoundsTrajectoryError);
}

TEST_CASE("generation is deterministic byte for byte") {
    TempDir a("secvos-gen-a"), b("secvos-gen-b");
    SyntheticSpec spec = tiny_spec();
    spec.seed = 42;
    spec.speckle_amplitude = 6;
    generate_synthetic(spec, a.path, "v");
    generate_synthetic(spec, b.path, "v");
    for (const char* rel : {"frames/00000.png", "frames/00002.png",
                            "annotations/00001.png", "meta.json"})
        CHECK(slurp(a.path / "v" / rel) == slurp(b.path / "v" / rel));
}

TEST_CASE("generated datasets load back with matching masks") {
    TempDir tmp("secvos-load");
    const SyntheticSpec spec = tiny_spec();
    const RenderedVideo rendered = render_synthetic(spec);
    const DatasetLayout layout = generate_synthetic(spec, tmp.path, "clip");

    CHECK(list_videos(layout) == std::vector<std::string>{"clip"});
    const LoadedVideo video = load_video(layout, "clip");
    CHECK(video.frames.size() == 3);
    CHECK(video.fps == doctest::Approx(24.0));
    CHECK_FALSE(video.fps_defaulted);
    REQUIRE(video.gt.size() == 2);
    for (int id : {1, 2})
        for (int t = 0; t < 3; ++t)
            CHECK(video.gt.at(id)[t] == rendered.gt.at(id)[t]);
    for (int t = 0; t < 3; ++t)
        CHECK(video.frames[t].pixels == rendered.frames[t].pixels);
}

TEST_CASE("annotation values outside the declared object list fail loading") {
    TempDir tmp("secvos-unknown");
    const SyntheticSpec spec = tiny_spec();
    generate_synthetic(spec, tmp.path, "clip");
    // meta.json declares {1, 2}; paint a 3 into one annotation.
    const fs::path ann = tmp.path / "clip" / "annotations" / "00001.png";
    IndexedImage img = read_png_indexed(ann.string());
    img.indices[0] = 3;
    img.palette = vos_palette();
    write_png_indexed(ann.string(), img);
    CHECK_THROWS_AS(load_video({tmp.path}, "clip"), UnknownObjectIdError);
}

TEST_CASE("prediction writing composes objects with higher ids on top") {
    TempDir tmp("secvos-pred");
    const int w = 16, h = 12;
    TrackResult result;
    for (int id : {1, 2}) {
        for (int t = 0; t < 2; ++t) {
            SegmentationRecord rec;
            rec.frame_index = t;
            rec.object_id = id;
            rec.mask = id == 1 ? BinaryMask::filled_rect(w, h, 2, 2, 6, 6)
                               : BinaryMask::filled_rect(w, h, 5, 5, 6, 6);
            rec.presence_score = 1.0;
            rec.confidence = 1.0;
            result.records[id].push_back(rec);
        }
    }
    result.stats.frames_total = 2;
    write_predictions(result, tmp.path);

    const IndexedImage composed =
        read_png_indexed((tmp.path / "00000.png").string());
    CHECK(composed.at(3, 3) == 1);
    CHECK(composed.at(6, 6) == 2); // overlap: higher id wins
    CHECK(composed.at(0, 0) == 0);
    CHECK(fs::exists(tmp.path / "stats.json"));
}

TEST_CASE("non-overlapping predictions round-trip bit-exactly") {
    TempDir tmp("secvos-rt");
    const int w = 20, h = 14;
    TrackResult result;
    for (int id : {1, 3}) {
        for (int t = 0; t < 3; ++t) {
            SegmentationRecord rec;
            rec.frame_index = t;
            rec.object_id = id;
            rec.mask = id == 1 ? BinaryMask::filled_rect(w, h, 1 + t, 1, 4, 4)
                               : BinaryMask::filled_rect(w, h, 12, 6, 5, 5);
            rec.presence_score = 1.0;
            rec.confidence = 1.0;
            result.records[id].push_back(rec);
        }
    }
    write_predictions(result, tmp.path);
    const auto loaded = load_annotation_dir(tmp.path);
    REQUIRE(loaded.size() == 2);
    for (int id : {1, 3})
        for (int t = 0; t < 3; ++t)
            CHECK(loaded.at(id)[static_cast<std::size_t>(t)] ==
                  result.records.at(id)[static_cast<std::size_t>(t)].mask);
}

TEST_CASE("frame files sort into temporal order") {
    TempDir tmp("secvos-order");
    fs::create_directories(tmp.path / "frames");
    for (int i = 0; i < 12; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "%05d.png", i);
        write_png_rgb((tmp.path / "frames" / name).string(),
                      ImageFrame::solid(4, 4, {static_cast<std::uint8_t>(i), 0, 0}));
    }
    const auto frames = load_frames_dir(tmp.path / "frames");
    REQUIRE(frames.size() == 12);
    for (int i = 0; i < 12; ++i) {
        CHECK(frames[static_cast<std::size_t>(i)].frame_index == i);
        CHECK(frames[static_cast<std::size_t>(i)].pixels[0] == i);
    }
}

TEST_CASE("synthetic specs parse from JSON with motion segments") {
    const std::string text = R"({
        "width": 32, "height": 24, "frame_count": 10, "fps": 12,
        "cuts": [5],
        "segment_colors": [[0,180,180],[60,60,220]],
        "objects": [{
            "id": 1,
            "segments": [
                {"from": 0, "to": 4, "x": 2, "y": 3, "w": 4, "h": 4,
                 "color": [255,0,0], "dx": 1},
                {"from": 6, "to": 9, "x": 20, "y": 10, "w": 4, "h": 4,
                 "color": [255,255,0]}
            ]
        }]
    })";
    const SyntheticSpec spec = synthetic_spec_from_json(text);
    CHECK(spec.frame_count == 10);
    CHECK(spec.cut_indices == std::vector<int>{5});
    REQUIRE(spec.objects.size() == 1);
    CHECK(spec.objects[0].states[0]->x == 2);
    CHECK(spec.objects[0].states[4]->x == 6);      // dx = 1 per frame
    CHECK_FALSE(spec.objects[0].states[5].has_value()); // absent at frame 5
    CHECK(spec.objects[0].states[6]->color[1] == 255);

    const RenderedVideo v = render_synthetic(spec);
    CHECK(v.frames.size() == 10);
    CHECK_FALSE(v.gt.at(1)[5].any());
}
