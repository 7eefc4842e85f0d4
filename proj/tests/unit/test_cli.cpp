#include "commands.hpp"

#include "hyperslice/modelio.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "hyperslice");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hyperslice::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t lines_starting(const fs::path& file, const std::string& prefix)
{
    std::ifstream in(file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) ++n;
    return n;
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hyperslice_cli_" + name))
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("generate")
{
    Scratch s("generate");
    auto r = cli({"generate", "3torus", "--delta-ang", "0.7853981633974483", "-o", s / "t.hsl"});
    CHECK(r.code == 0);
    CHECK(r.out.find("tets 3072") != std::string::npos);
    CHECK(r.out.find("closed yes") != std::string::npos);
    CHECK(fs::exists(s / "t.hsl"));

    r = cli({"generate", "3sphere", "--radius", "1", "--steps", "8", "8", "16", "-o", s / "s.hsl"});
    CHECK(r.code == 0);
    CHECK(r.out.find("closed yes") != std::string::npos);

    r = cli({"generate", "3torus", "--tube", "0.5", "--depth", "1", "-o", s / "bad.hsl"});
    CHECK(r.code != 0);
    CHECK(r.err.find("tube > depth") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "bad.hsl"));

    r = cli({"generate", "3cube", "-o", s / "x.hsl"});
    CHECK(r.code == 2);

    r = cli({"generate", "3sphere", "--extrude", "--t-range", "0", "1", "-o", s / "e.hsl"});
    CHECK(r.code == 0);
    CHECK(hyperslice::load_model(s / "e.hsl").has_velocities());
}

TEST_CASE("slice")
{
    Scratch s("slice");
    REQUIRE(cli({"generate", "3sphere", "-o", s / "s.hsl"}).code == 0);
    REQUIRE(cli({"generate", "3torus", "-o", s / "t.hsl"}).code == 0);

    auto r = cli({"slice", s / "s.hsl", "--plane", "w=0.6", "-o", s / "s.obj"});
    CHECK(r.code == 0);
    CHECK(r.out.find("genus 0") != std::string::npos);
    CHECK(r.out.find("max radius error") != std::string::npos);
    CHECK(lines_starting(s.dir / "s.obj", "f ") > 0);

    r = cli({"slice", s / "t.hsl", "--plane", "w=1.5", "-o", s / "empty.obj"});
    CHECK(r.code == 0);
    CHECK(r.out.find("empty section") != std::string::npos);
    CHECK(lines_starting(s.dir / "empty.obj", "f ") == 0);

    r = cli({"slice", s / "t.hsl", "--cofactors", "0", "0", "0", "0", "0"});
    CHECK(r.code != 0);
    CHECK(r.err.find("InvalidPlane") != std::string::npos);

    r = cli({"slice", s / "t.hsl", "--anchor", "0", "0", "0", "0.5", "--rotate", "x", "w", "0.3", "--rotate", "y",
             "z", "0.2", "--workers", "2", "--format", "json", "-o", s / "t.json"});
    CHECK(r.code == 0);
    std::ifstream j(s / "t.json");
    const auto mesh = nlohmann::json::parse(j);
    CHECK(mesh["triangle_count"].get<int>() > 0);

    r = cli({"slice", s / "t.hsl", "--plane", "w=0.1", "--cofactors", "0", "0", "0", "0", "1"});
    CHECK(r.code == 2);
    r = cli({"slice", s / "t.hsl", "--plane", "q=0.1"});
    CHECK(r.code == 2);
    r = cli({"slice", s / "missing.hsl", "--plane", "w=0"});
    CHECK(r.code == 2);
}

TEST_CASE("sweep")
{
    Scratch s("sweep");
    REQUIRE(cli({"generate", "3sphere", "-o", s / "s.hsl"}).code == 0);
    auto r = cli({"sweep", s / "s.hsl", "--axis", "w", "--range", "-0.9", "0.9", "--frames", "8", "--out-dir",
                  s / "frames"});
    CHECK(r.code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(s.dir / "frames")) files += e.path().extension() == ".obj";
    CHECK(files == 8);
    CHECK(fs::exists(s.dir / "frames" / "frame_000.obj"));
    CHECK(fs::exists(s.dir / "frames" / "frame_007.obj"));
    CHECK(r.out.find("frame offset V F euler components") == 0);
    CHECK(r.out.find("radius_err") != std::string::npos);

    r = cli({"sweep", s / "s.hsl", "--range", "0", "1", "--frames", "0"});
    CHECK(r.code == 2);
}

TEST_CASE("validate")
{
    Scratch s("validate");
    REQUIRE(cli({"generate", "3torus", "--delta-ang", "1.5707963267948966", "-o", s / "t.hsl"}).code == 0);
    CHECK(cli({"validate", s / "t.hsl"}).code == 0);

    std::ofstream(s / "one.hsl") << "#hyperslice v1\n"
                                    "v 0 0 0 0 0 0 0\nv 0 1 0 0 0 0 0\nv 0 0 1 0 0 0 0\nv 0 0 0 1 0 0 0\n"
                                    "tet 0 1 2 3\n";
    auto r = cli({"validate", s / "one.hsl"});
    CHECK(r.code == 1);
    CHECK(r.out.find("boundary_faces 4") != std::string::npos);

    std::ofstream(s / "bad.hsl") << "#hyperslice v1\nv 0 0 zero\n";
    r = cli({"validate", s / "bad.hsl"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("project")
{
    Scratch s("project");
    REQUIRE(cli({"generate", "3torus", "--delta-ang", "1.5707963267948966", "-o", s / "t.hsl"}).code == 0);
    auto r = cli({"project", s / "t.hsl", "--standard", "--out-dir", s / "views"});
    CHECK(r.code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(s.dir / "views")) files += e.path().extension() == ".obj";
    CHECK(files == 7);

    r = cli({"project", s / "t.hsl", "--drop", "w", "--rotate", "x", "w", "0.5", "-o", s / "one.obj"});
    CHECK(r.code == 0);
    CHECK(lines_starting(s.dir / "one.obj", "v ") == 64);

    r = cli({"project", s / "t.hsl", "--drop", "t", "-o", s / "bad.obj"});
    CHECK(r.code == 1);
}

TEST_CASE("serve rejects a missing model directory")
{
    auto r = cli({"serve", "--models", "/nonexistent/hyperslice/models", "--port", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("does not exist") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

} // TEST_SUITE
