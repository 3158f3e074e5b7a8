#include <doctest.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "radcap/parse.hpp"

using namespace radcap;

TEST_CASE("class normalization") {
    const auto& v = ClassVocabulary::defaults();
    CHECK(v.normalize("Sedan") == "sedan");
    CHECK(v.normalize("truck") == "bus or truck");
    CHECK(v.normalize("the cars") == "sedan");
    CHECK(v.normalize("Pedestrians") == "pedestrian");
    CHECK(v.normalize("a Bus") == "bus or truck");
    CHECK(v.normalize("BICYCLE  GROUP") == "bicycle group");
    CHECK_FALSE(v.normalize("spaceship").has_value());
    CHECK_FALSE(v.normalize("").has_value());
}

TEST_CASE("custom vocabulary file") {
    const auto v = ClassVocabulary::from_lines({"# two classes", "boat|ship|vessel", "buoy"});
    CHECK(v.classes() == std::vector<std::string>{"boat", "buoy"});
    CHECK(v.normalize("Ship") == "boat");
    CHECK(v.normalize("buoys") == "buoy");
    CHECK_FALSE(v.normalize("sedan").has_value());
}

TEST_CASE("prose parsing of the canonical template") {
    const auto p = parse_prose(
        "There are 3 objects. Closest: a sedan slightly to the right at 13 m, "
        "a sedan to the left at 22 m.");
    CHECK(p.status == ParseStatus::Ok);
    CHECK(p.declared_count == 3);
    REQUIRE(p.objects.size() == 2);
    CHECK(p.objects[0].class_name == "sedan");
    CHECK(p.objects[0].range_m == 13.0);
    CHECK(p.objects[0].sector == BearingSector::SlightlyRight);
    CHECK_FALSE(p.objects[0].azimuth_deg.has_value());
    CHECK(p.objects[1].range_m == 22.0);
    CHECK(p.objects[1].sector == BearingSector::Left);
}

TEST_CASE("prose parsing of the empty caption and empty scene") {
    CHECK(parse_prose("").status == ParseStatus::Unparsed);
    CHECK(parse_prose("").objects.empty());

    const auto p = parse_prose("There are no objects.");
    CHECK(p.status == ParseStatus::Ok);
    CHECK(p.objects.empty());
    CHECK(p.declared_count == 0);
}

TEST_CASE("prose parsing survives the hand-labeled adversarial fixture") {
    std::ifstream in(std::string(RADCAP_TEST_DATA_DIR) + "/adversarial_prose.tsv");
    REQUIRE(in.good());
    std::string line;
    int cases = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++cases;
        const size_t t1 = line.find('\t');
        const size_t t2 = line.find('\t', t1 + 1);
        REQUIRE(t1 != std::string::npos);
        REQUIRE(t2 != std::string::npos);
        const std::string caption = line.substr(0, t1);
        const std::string expect_status = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string expect_objs = line.substr(t2 + 1);

        CAPTURE(caption);
        const auto p = parse_prose(caption);
        CHECK(status_token(p.status) == expect_status);

        std::vector<std::string> expected;
        if (expect_objs != "-") {
            std::stringstream ss(expect_objs);
            std::string item;
            while (std::getline(ss, item, ';'))
                if (!item.empty()) expected.push_back(item);
        }
        REQUIRE(p.objects.size() == expected.size());
        for (size_t i = 0; i < expected.size(); ++i) {
            std::stringstream fs(expected[i]);
            std::string cls, range, sector;
            std::getline(fs, cls, '|');
            std::getline(fs, range, '|');
            std::getline(fs, sector, '|');
            CHECK(p.objects[i].class_name == cls);
            if (range == "-") {
                CHECK_FALSE(p.objects[i].range_m.has_value());
            } else {
                REQUIRE(p.objects[i].range_m.has_value());
                CHECK(*p.objects[i].range_m == doctest::Approx(std::stod(range)).epsilon(1e-9));
            }
            if (sector == "-") {
                CHECK_FALSE(p.objects[i].sector.has_value());
            } else {
                REQUIRE(p.objects[i].sector.has_value());
                CHECK(sector_token(*p.objects[i].sector) == sector);
            }
        }
    }
    CHECK(cases >= 10);
}

TEST_CASE("structured parsing of the canonical form with a prose prefix") {
    const auto p = parse_structured(
        R"(Sure! {"objects":[{"class":"sedan","azimuth_deg":-9,"range_m":13}]})");
    CHECK(p.status == ParseStatus::Ok);
    REQUIRE(p.objects.size() == 1);
    CHECK(p.objects[0].class_name == "sedan");
    CHECK(p.objects[0].azimuth_deg == -9.0);
    CHECK(p.objects[0].range_m == 13.0);
    CHECK_FALSE(p.objects[0].sector.has_value());
}

TEST_CASE("structured parsing of an empty object list") {
    const auto p = parse_structured(R"({"objects":[]})");
    CHECK(p.status == ParseStatus::Ok);
    CHECK(p.objects.empty());
}

TEST_CASE("structured parsing keeps the complete prefix of a truncated array") {
    const auto p = parse_structured(
        R"({"objects":[{"class":"sedan","azimuth_deg":-9,"range_m":13},{"class":"bus)");
    CHECK(p.status == ParseStatus::Partial);
    REQUIRE(p.objects.size() == 1);
    CHECK(p.objects[0].class_name == "sedan");
    CHECK(p.objects[0].range_m == 13.0);
}

TEST_CASE("structured parsing is invariant to whitespace and key order") {
    const auto a = parse_structured(R"({"objects":[{"class":"sedan","azimuth_deg":-9,"range_m":13}]})");
    const auto b = parse_structured(
        "{\n  \"objects\" : [ { \"range_m\" : 13 ,\n \"class\" : \"sedan\" , "
        "\"azimuth_deg\" : -9 } ]\n}");
    REQUIRE(a.objects.size() == 1);
    REQUIRE(b.objects.size() == 1);
    CHECK(a.status == b.status);
    CHECK(a.objects[0].class_name == b.objects[0].class_name);
    CHECK(a.objects[0].range_m == b.objects[0].range_m);
    CHECK(a.objects[0].azimuth_deg == b.objects[0].azimuth_deg);
}

TEST_CASE("structured parsing tolerances") {
    SUBCASE("numbers as strings") {
        const auto p = parse_structured(R"({"objects":[{"class":"sedan","range_m":"13","azimuth_deg":"-9"}]})");
        REQUIRE(p.objects.size() == 1);
        CHECK(p.objects[0].range_m == 13.0);
        CHECK(p.objects[0].azimuth_deg == -9.0);
    }
    SUBCASE("trailing commas") {
        const auto p = parse_structured(R"({"objects":[{"class":"sedan","range_m":13},]})");
        CHECK(p.objects.size() == 1);
    }
    SUBCASE("missing spatial fields keep the object but degrade the status") {
        const auto p = parse_structured(R"({"objects":[{"class":"sedan"}]})");
        CHECK(p.status == ParseStatus::Partial);
        REQUIRE(p.objects.size() == 1);
        CHECK_FALSE(p.objects[0].has_spatial());
    }
    SUBCASE("objects without a class are dropped") {
        const auto p = parse_structured(R"({"objects":[{"range_m":13},{"class":"sedan","range_m":5}]})");
        CHECK(p.status == ParseStatus::Partial);
        REQUIRE(p.objects.size() == 1);
        CHECK(p.objects[0].class_name == "sedan");
    }
    SUBCASE("key aliases from looser emitters") {
        const auto p = parse_structured(R"({"objects":[{"class":"sedan","az_deg":-9,"rng":13}]})");
        REQUIRE(p.objects.size() == 1);
        CHECK(p.objects[0].azimuth_deg == -9.0);
        CHECK(p.objects[0].range_m == 13.0);
    }
    SUBCASE("decimal numerics") {
        const auto p = parse_structured(R"({"objects":[{"class":"sedan","range_m":13.7}]})");
        REQUIRE(p.objects.size() == 1);
        CHECK(*p.objects[0].range_m == doctest::Approx(13.7).epsilon(1e-12));
    }
}

TEST_CASE("out-of-vocabulary structured classes are tallied, not kept") {
    const auto p = parse_structured(
        R"({"objects":[{"class":"spaceship","range_m":10},{"class":"sedan","range_m":5}]})");
    CHECK(p.oov_count == 1);
    REQUIRE(p.objects.size() == 1);
    CHECK(p.objects[0].class_name == "sedan");
    CHECK(p.status == ParseStatus::Partial);
}

TEST_CASE("structured parsing of garbage is Unparsed") {
    CHECK(parse_structured("").status == ParseStatus::Unparsed);
    CHECK(parse_structured("no braces here").status == ParseStatus::Unparsed);
    CHECK(parse_structured("{\"detections\":[]}").status == ParseStatus::Unparsed);
    CHECK(parse_structured("{ smiley face }").status == ParseStatus::Unparsed);
    CHECK(parse_structured(R"({"objects":17})").status == ParseStatus::Unparsed);
}

TEST_CASE("caption round trip over randomized scenes") {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 300; ++trial) {
        const auto scene = testing_helpers::random_scene(rng, 8);
        const auto described = select_topk(fov_filter(scene), 4);
        const int64_t total = static_cast<int64_t>(fov_filter(scene).size());

        const GtCaption prose = gen_prose(described, total);
        const auto pp = parse_prose(prose.text);
        REQUIRE(pp.objects.size() == described.size());
        for (size_t i = 0; i < described.size(); ++i) {
            CHECK(pp.objects[i].class_name == described[i].class_name);
            REQUIRE(pp.objects[i].range_m.has_value());
            CHECK(std::abs(*pp.objects[i].range_m - described[i].range_m) <= 0.5);
            REQUIRE(pp.objects[i].sector.has_value());
            CHECK(*pp.objects[i].sector == bearing_sector(described[i].azimuth_deg));
        }

        const GtCaption structured = gen_structured(described, total);
        const auto sp = parse_structured(structured.text);
        CHECK(sp.status == ParseStatus::Ok);
        REQUIRE(sp.objects.size() == described.size());
        for (size_t i = 0; i < described.size(); ++i) {
            CHECK(sp.objects[i].class_name == described[i].class_name);
            CHECK(*sp.objects[i].range_m == std::llround(described[i].range_m));
            CHECK(*sp.objects[i].azimuth_deg == std::llround(described[i].azimuth_deg));
        }
    }
}

TEST_CASE("parsers do not crash on random byte soup") {
    std::mt19937 rng(34);
    std::uniform_int_distribution<int> len(0, 300);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 1000; ++trial) {
        std::string s(static_cast<size_t>(len(rng)), '\0');
        for (char& c : s) c = static_cast<char>(byte(rng));
        const auto a = parse_prose(s);
        const auto b = parse_structured(s);
        CHECK((a.status == ParseStatus::Ok || a.status == ParseStatus::Partial ||
               a.status == ParseStatus::Unparsed));
        CHECK((b.status == ParseStatus::Ok || b.status == ParseStatus::Partial ||
               b.status == ParseStatus::Unparsed));
        if (a.status == ParseStatus::Unparsed) CHECK(a.objects.empty());
        if (b.status == ParseStatus::Unparsed) CHECK(b.objects.empty());
    }
}

TEST_CASE("parse_caption dispatches on the record format") {
    CaptionRecord rec{"18_0", CaptionFormat::Prose, "a sedan straight ahead at 5 m"};
    auto p = parse_caption(rec);
    CHECK(p.frame_key == "18_0");
    REQUIRE(p.objects.size() == 1);
    CHECK(p.objects[0].sector == BearingSector::Ahead);

    rec.format = CaptionFormat::Structured;
    rec.text = R"({"objects":[{"class":"sedan","azimuth_deg":3,"range_m":5}]})";
    p = parse_caption(rec);
    CHECK(p.objects[0].azimuth_deg == 3.0);
}

TEST_CASE("predictions file writer emits one record per caption") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "radcap_predictions_test.txt";
    std::vector<ParsedPrediction> preds(2);
    preds[0].frame_key = "18_0";
    preds[0].status = ParseStatus::Ok;
    preds[0].objects.push_back({"sedan", 13.0, std::nullopt, BearingSector::Ahead});
    preds[1].frame_key = "18_1";
    preds[1].status = ParseStatus::Unparsed;
    write_predictions(path, preds);

    std::ifstream in(path);
    std::string line1, line2;
    REQUIRE(std::getline(in, line1));
    REQUIRE(std::getline(in, line2));
    CHECK(line1 ==
          "18_0\tok\t{\"oov\":0,\"objects\":[{\"class\":\"sedan\",\"range_m\":13.0,"
          "\"sector\":\"ahead\"}]}");
    CHECK(line2 == "18_1\tunparsed\t{\"oov\":0,\"objects\":[]}");
}
