#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bimef/image.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace bimef;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bimef");
    std::ostringstream out, err;
    const int code = cli::main(args, out, err);
    return {code, out.str(), err.str()};
}

// Random image on the 8-bit grid so a PNG round trip is lossless.
Image quantized(int w, int h, std::uint32_t seed, double hi = 0.5) {
    auto img = bimef::testing::random_image(w, h, seed, 0.0, hi);
    for (double& v : img.values()) v = std::round(v * 255.0) / 255.0;
    return img;
}

std::vector<int> bytes_of(const Image& img) {
    std::vector<int> out;
    for (double v : img.values()) out.push_back(to_byte(v));
    return out;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("enhance writes an image of the input size") {
    const auto dir = bimef::testing::temp_dir("cli_enhance");
    const auto in = dir / "in.png";
    save_image(quantized(40, 30, 1), in);

    const auto r = run({"enhance", in.string(), (dir / "out.png").string(), "--report-k"});
    REQUIRE(r.code == 0);
    const auto out = load_image(dir / "out.png");
    CHECK(out.width() == 40);
    CHECK(out.height() == 30);
    REQUIRE(r.out.rfind("k_hat=", 0) == 0);
    const double k = std::stod(r.out.substr(6));
    CHECK(k >= 1.0);
    CHECK(k <= 100.0);
}

TEST_CASE("mu = 0 and k = 1 reproduce the input") {
    const auto dir = bimef::testing::temp_dir("cli_identity");
    const auto in = dir / "in.png";
    const auto img = quantized(32, 24, 2);
    save_image(img, in);

    SUBCASE("mu = 0") {
        REQUIRE(run({"enhance", in.string(), (dir / "a.png").string(), "--mu", "0"}).code == 0);
        CHECK(bytes_of(load_image(dir / "a.png")) == bytes_of(img));
    }
    SUBCASE("k = 1") {
        REQUIRE(run({"enhance", in.string(), (dir / "b.png").string(), "--k", "1"}).code == 0);
        CHECK(bytes_of(load_image(dir / "b.png")) == bytes_of(img));
    }
}

TEST_CASE("enhance options") {
    const auto dir = bimef::testing::temp_dir("cli_options");
    const auto in = dir / "in.png";
    save_image(quantized(24, 20, 3), in);
    const auto out = dir / "res.png";

    SUBCASE("fixed k is reported back") {
        const auto r = run({"enhance", in.string(), out.string(), "--k", "4", "--report-k"});
        REQUIRE(r.code == 0);
        CHECK(r.out == "k_hat=4\n");
    }
    SUBCASE("intermediates") {
        REQUIRE(run({"enhance", in.string(), out.string(), "--dump-intermediates"}).code == 0);
        for (const char* name : {"res.T.png", "res.W.png", "res.synthetic.png"}) {
            REQUIRE(fs::exists(dir / name));
            const auto m = load_image(dir / name);
            CHECK(m.width() == 24);
            CHECK(m.height() == 20);
        }
    }
    SUBCASE("timings") {
        const auto r = run({"enhance", in.string(), out.string(), "--timings"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("illumination=") != std::string::npos);
        CHECK(r.out.find("total=") != std::string::npos);
    }
    SUBCASE("mu above one warns but runs") {
        const auto r = run({"enhance", in.string(), out.string(), "--mu", "1.5"});
        CHECK(r.code == 0);
        CHECK(r.err.find("warning") != std::string::npos);
    }
    SUBCASE("preconditioner choice does not change the result") {
        const auto a = dir / "jacobi.png";
        const auto b = dir / "mic.png";
        REQUIRE(run({"enhance", in.string(), a.string(), "--preconditioner", "jacobi", "--k", "3",
                     "--pcg-tol", "1e-9", "--pcg-max-iter", "20000"}).code == 0);
        REQUIRE(run({"enhance", in.string(), b.string(), "--preconditioner", "mic", "--k", "3",
                     "--pcg-tol", "1e-9"}).code == 0);
        const auto x = bytes_of(load_image(a));
        const auto y = bytes_of(load_image(b));
        int worst = 0;
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
        CHECK(worst <= 1);
    }
}

TEST_CASE("enhance errors exit non-zero") {
    const auto dir = bimef::testing::temp_dir("cli_errors");
    SUBCASE("missing input") {
        const auto r = run({"enhance", (dir / "nope.png").string(), (dir / "o.png").string()});
        CHECK(r.code != 0);
        CHECK(r.err.find("error") != std::string::npos);
    }
    SUBCASE("not an image") {
        std::ofstream(dir / "text.png") << "hello";
        CHECK(run({"enhance", (dir / "text.png").string(), (dir / "o.png").string()}).code != 0);
    }
    SUBCASE("invalid parameter") {
        save_image(quantized(8, 8, 4), dir / "in.png");
        CHECK(run({"enhance", (dir / "in.png").string(), (dir / "o.png").string(), "--window", "4"})
                  .code != 0);
        CHECK(run({"enhance", (dir / "in.png").string(), (dir / "o.png").string(), "--mu", "-1"})
                  .code != 0);
    }
    SUBCASE("unknown subcommand or flag") {
        CHECK(run({"sharpen", "a", "b"}).code != 0);
        CHECK(run({"enhance", "a.png", "b.png", "--bogus"}).code != 0);
        CHECK(run({}).code != 0);
    }
}

TEST_CASE("batch") {
    const auto dir = bimef::testing::temp_dir("cli_batch");
    const auto in = dir / "in";
    const auto out = dir / "out";
    fs::create_directories(in);

    SUBCASE("empty directory warns and succeeds") {
        const auto r = run({"batch", in.string(), out.string()});
        CHECK(r.code == 0);
        CHECK(r.out.empty());
        CHECK(r.err.find("warning") != std::string::npos);
    }
    SUBCASE("one summary line per image") {
        for (int i = 0; i < 3; ++i) {
            save_image(quantized(20, 16, 10 + i), in / ("img" + std::to_string(i) + ".png"));
        }
        std::ofstream(in / "notes.txt") << "skip me";
        const auto r = run({"batch", in.string(), out.string(), "--jobs", "2"});
        REQUIRE(r.code == 0);
        const auto rows = lines(r.out);
        CHECK(rows.size() == 3);
        for (const auto& row : rows) {
            CHECK(std::count(row.begin(), row.end(), ',') == 2);
            CHECK(row.rfind("img", 0) == 0);
        }
        for (int i = 0; i < 3; ++i) CHECK(fs::exists(out / ("img" + std::to_string(i) + ".png")));
    }
    SUBCASE("a corrupt file fails the batch but not the others") {
        save_image(quantized(20, 16, 20), in / "good.png");
        std::ofstream(in / "bad.png") << "not a png";
        const auto r = run({"batch", in.string(), out.string(), "--jobs", "1"});
        CHECK(r.code == 1);
        CHECK(fs::exists(out / "good.png"));
        CHECK(r.err.find("bad.png") != std::string::npos);
    }
    SUBCASE("missing input directory") {
        CHECK(run({"batch", (dir / "none").string(), out.string()}).code != 0);
    }
}

TEST_CASE("metrics") {
    const auto dir = bimef::testing::temp_dir("cli_metrics");
    const auto a = dir / "a.png";
    save_image(quantized(30, 30, 30), a);

    SUBCASE("identical images") {
        const auto r = run({"metrics", a.string(), a.string()});
        REQUIRE(r.code == 0);
        CHECK(r.out == "LOE=0\n");
    }
    SUBCASE("csv row") {
        const auto b = dir / "b.png";
        save_image(quantized(30, 30, 31), b);
        const auto r = run({"metrics", a.string(), b.string(), "--csv", "--loe-size", "20"});
        REQUIRE(r.code == 0);
        const auto rows = lines(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == "path,loe");
        const double expected = loe(load_image(a), load_image(b), LoeConfig{20});
        const auto comma = rows[1].rfind(',');
        CHECK(rows[1].substr(0, comma) == b.string());
        CHECK(std::stod(rows[1].substr(comma + 1)) == doctest::Approx(expected));
    }
    SUBCASE("directories paired by stem") {
        fs::create_directories(dir / "orig");
        fs::create_directories(dir / "enh");
        save_image(quantized(30, 30, 40), dir / "orig" / "x.png");
        save_image(quantized(30, 30, 41), dir / "orig" / "y.png");
        save_image(quantized(30, 30, 42), dir / "enh" / "x.png");
        const auto r = run({"metrics", (dir / "orig").string(), (dir / "enh").string()});
        REQUIRE(r.code == 0);
        const auto rows = lines(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].find("x.png") != std::string::npos);
        CHECK(r.err.find("y.png") != std::string::npos);
    }
    SUBCASE("size mismatch") {
        save_image(quantized(20, 30, 50), dir / "c.png");
        CHECK(run({"metrics", a.string(), (dir / "c.png").string()}).code != 0);
    }
}
