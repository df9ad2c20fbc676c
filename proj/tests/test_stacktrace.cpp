#include "doctest.h"

#include <random>

#include "sbest/stacktrace.hpp"

using namespace sbest;

TEST_CASE("MethodId canonical form round-trips") {
    for (const char* text : {"org.x$C#m(int)", "org.x$C#m", "org.x$C#m()", "org.x$Outer$Inner#<init>(int,java.lang.String)",
                             "$Default#run()", "a.b.c$D#lambda$go$0(java.util.List)"}) {
        const auto id = MethodId::parse(text);
        CHECK(id.str() == text);
        CHECK(MethodId::parse(id.str()) == id);
    }
    const auto id = MethodId::parse("org.x$C#m(int)");
    CHECK(id.package() == "org.x");
    CHECK(id.class_name() == "C");
    CHECK(id.method() == "m");
    CHECK(id.signature() == "int");
    CHECK(id.class_fqn() == "org.x.C");
}

TEST_CASE("MethodId rejects malformed text") {
    for (const char* text : {"", "org.x.C.m", "org.x$C", "org.x$C#", "org.x$C#m(int", "org..x$C#m", "org.x$#m"})
        CHECK_THROWS_AS(MethodId::parse(text), Error);
}

TEST_CASE("same_method falls back to the coarse key only across granularities") {
    const auto fine = MethodId::parse("org.x$C#m(int)");
    const auto other = MethodId::parse("org.x$C#m(long)");
    const auto coarse = MethodId::parse("org.x$C#m");
    CHECK(same_method(fine, coarse));
    CHECK(coarse_only_match(fine, coarse));
    CHECK_FALSE(same_method(fine, other));
    CHECK(same_method(fine, fine));
    CHECK(MethodId::from_frame("org.x.C$Inner", "m") == MethodId::parse("org.x$C$Inner#m"));
}

TEST_CASE("parse_stack_traces: single frame trace") {
    const auto traces = parse_stack_traces(
        "java.io.IOException: Error detected parsing the header\n"
        "\tat org.apache.commons.compress.archivers.tar.TarArchiveInputStream.getNextTarEntry(TarArchiveInputStream.java:201)");
    REQUIRE(traces.size() == 1);
    const auto& t = traces[0];
    CHECK(t.exception_fqn == "java.io.IOException");
    CHECK(t.message == "Error detected parsing the header");
    REQUIRE(t.frames.size() == 1);
    CHECK(t.frames[0].class_fqn == "org.apache.commons.compress.archivers.tar.TarArchiveInputStream");
    CHECK(t.frames[0].method_name == "getNextTarEntry");
    CHECK(t.frames[0].file_name == "TarArchiveInputStream.java");
    CHECK(t.frames[0].line_number == 201);
    CHECK(t.frames[0].frame_index == 0);
}

TEST_CASE("parse_stack_traces: prose without frames yields nothing") {
    CHECK(parse_stack_traces("").empty());
    CHECK(parse_stack_traces("The parser fails when reading a header.\nPlease fix: it is at the top.").empty());
    CHECK(parse_stack_traces("java.lang.NullPointerException\n\nno frames here").empty());
}

TEST_CASE("parse_stack_traces: caused-by chain is flattened after the primary frames") {
    const char* text =
        "app.A: outer\n"
        "\tat app.X.one(X.java:1)\n"
        "\tat app.X.two(X.java:2)\n"
        "Caused by: app.B: inner\n"
        "\tat app.Y.three(Y.java:3)\n"
        "\t... 2 more\n";
    const auto traces = parse_stack_traces(text);
    REQUIRE(traces.size() == 1);
    REQUIRE(traces[0].causes.size() == 1);
    CHECK(traces[0].causes[0].exception_fqn == "app.B");
    CHECK(traces[0].causes[0].message == "inner");
    CHECK(traces[0].causes[0].frames[0].frame_index == 0);
    std::vector<std::string> order;
    for (const auto* f : flatten_frames(traces[0])) order.push_back(f->method_name);
    CHECK(order == std::vector<std::string>{"one", "two", "three"});
}

TEST_CASE("parse_stack_traces: unknown and native sources") {
    const auto traces = parse_stack_traces(
        "java.lang.IllegalStateException\n"
        "\tat sun.reflect.NativeMethodAccessorImpl.invoke0(Native Method)\n"
        "\tat org.x.Gen$1.apply(Unknown Source)\n"
        "\tat org.x.Gen.run(Gen.java)\n");
    REQUIRE(traces.size() == 1);
    const auto& f = traces[0].frames;
    REQUIRE(f.size() == 3);
    CHECK_FALSE(f[0].file_name);
    CHECK_FALSE(f[0].line_number);
    CHECK_FALSE(f[1].file_name);
    CHECK(f[1].class_fqn == "org.x.Gen$1");
    CHECK(f[2].file_name == "Gen.java");
    CHECK_FALSE(f[2].line_number);
    CHECK_FALSE(traces[0].message);
}

TEST_CASE("parse_stack_traces: several traces in one report") {
    const auto traces = parse_stack_traces(
        "first run:\n"
        "java.lang.RuntimeException: a\n"
        "\tat p.A.f(A.java:1)\n"
        "then again:\n"
        "java.lang.RuntimeException: b\n"
        "\tat p.B.g(B.java:2)\n");
    REQUIRE(traces.size() == 2);
    CHECK(traces[0].message == "a");
    CHECK(traces[1].message == "b");
}

TEST_CASE("parse_stack_traces: module prefixes, html entities and thread banner") {
    const auto traces = parse_stack_traces(
        "Exception in thread \"main\" java.lang.NullPointerException: boom\n"
        "\tat java.base/java.util.Objects.requireNonNull(Objects.java:208)\n"
        "\tat app//org.x.Foo.&lt;init&gt;(Foo.java:12)\n");
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].exception_fqn == "java.lang.NullPointerException");
    CHECK(traces[0].frames[0].class_fqn == "java.util.Objects");
    CHECK(traces[0].frames[1].method_name == "<init>");
}

TEST_CASE("internal_view filters, deduplicates and keeps first occurrence") {
    ParsedStackTrace t;
    t.exception_fqn = "E";
    auto frame = [](const char* cls, const char* m) { return StackFrame{cls, m, std::nullopt, std::nullopt, 0}; };
    t.frames = {frame("lib.X", "a"), frame("app.Y", "b"), frame("app.Y", "b"), frame("app.Z", "c")};
    const std::vector<std::string> app{"app"};
    auto view = internal_view(t, app);
    REQUIRE(view.methods.size() == 2);
    CHECK(view.methods[0].str() == "app$Y#b");
    CHECK(view.methods[1].str() == "app$Z#c");

    const std::vector<std::string> none{"nothing.here"};
    CHECK(internal_view(t, none).empty());

    // Recursion: app.Y.b at frame 0 and again at frame 5.
    ParsedStackTrace rec;
    rec.frames = {frame("app.Y", "b"), frame("app.Q", "q"), frame("lib.L", "l"), frame("app.R", "r"),
                  frame("app.S", "s"), frame("app.Y", "b")};
    view = internal_view(rec, app);
    REQUIRE(view.methods.size() == 4);
    CHECK(view.methods[0].str() == "app$Y#b");
    CHECK(view.position_of(MethodId::parse("app$Y#b")) == 1u);
}

TEST_CASE("matches_prefix respects package boundaries") {
    CHECK(matches_prefix("org.apache.commons.lang.StringUtils", "org.apache.commons.lang"));
    CHECK_FALSE(matches_prefix("org.apache.commons.lang3.StringUtils", "org.apache.commons.lang"));
    CHECK(matches_prefix("org.apache.commons.lang3.StringUtils", "org.apache.commons."));
    CHECK(matches_prefix("app.Y", "app.Y"));
    CHECK(matches_prefix("app.Y$1", "app.Y"));
    CHECK_FALSE(matches_prefix("app.Y", ""));
}

TEST_CASE("top_internal_methods truncates and keeps order") {
    InternalFrameView view;
    for (int i = 0; i < 7; ++i) view.methods.push_back(MethodId("app", "C", "m" + std::to_string(i)));
    auto top = top_internal_methods(view, 5);
    REQUIRE(top.size() == 5);
    CHECK(top.front().method() == "m0");
    CHECK(top.back().method() == "m4");
    view.methods.resize(3);
    CHECK(top_internal_methods(view, 5).size() == 3);
    REQUIRE(top_internal_methods(view, 1).size() == 1);
    CHECK(top_internal_methods(view, 1)[0].method() == "m0");
    CHECK(top_internal_methods(InternalFrameView{}, 5).empty());
}

namespace {

ParsedStackTrace random_trace(std::mt19937_64& rng) {
    static const char* packages[] = {"app", "app.core", "lib", "lib.util", "java.lang"};
    static const char* classes[] = {"A", "B", "C$Inner", "D$1"};
    static const char* methods[] = {"run", "<init>", "lambda$x$0", "get", "apply"};
    std::uniform_int_distribution<int> pick5(0, 4), pick4(0, 3), nframes(1, 14), ncauses(0, 2), line(0, 400);
    auto segment = [&](int n) {
        ParsedStackTrace s;
        s.exception_fqn = std::string(packages[pick5(rng)]) + ".Ex" + std::to_string(pick4(rng));
        if (pick4(rng) > 0) s.message = "message " + std::to_string(line(rng));
        for (int i = 0; i < n; ++i) {
            StackFrame f;
            f.class_fqn = std::string(packages[pick5(rng)]) + "." + classes[pick4(rng)];
            f.method_name = methods[pick5(rng)];
            const int l = line(rng);
            if (l % 5 != 0) {
                f.file_name = std::string("F") + std::to_string(l % 7) + ".java";
                if (l % 3 != 0) f.line_number = l + 1;
            }
            f.frame_index = static_cast<std::size_t>(i);
            s.frames.push_back(std::move(f));
        }
        return s;
    };
    auto t = segment(nframes(rng));
    const int causes = ncauses(rng);
    for (int c = 0; c < causes; ++c) t.causes.push_back(segment(nframes(rng)));
    return t;
}

}  // namespace

TEST_CASE("property: rendering then parsing is the identity") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto t = random_trace(rng);
        const auto parsed = parse_stack_traces(render_text(t));
        REQUIRE(parsed.size() == 1);
        CHECK(parsed[0] == t);
    }
}

TEST_CASE("property: filtering is monotone and truncation is prefix-closed") {
    std::mt19937_64 rng(11);
    const std::vector<std::vector<std::string>> sets = {{"app"}, {"lib"}, {"app", "lib"}, {"app.core"}, {"app", "java"}};
    for (int i = 0; i < 200; ++i) {
        const auto t = random_trace(rng);
        for (const auto& p1 : sets) {
            for (const auto& p2 : sets) {
                auto both = p1;
                both.insert(both.end(), p2.begin(), p2.end());
                CHECK(internal_view(t, p1).methods.size() <= internal_view(t, both).methods.size());
            }
        }
        const std::vector<std::string> app{"app"};
        const auto view = internal_view(t, app);
        for (std::size_t m = 1; m <= 12; ++m) {
            const auto a = top_internal_methods(view, m);
            const auto b = top_internal_methods(view, m + 1);
            REQUIRE(a.size() <= b.size());
            CHECK(std::equal(a.begin(), a.end(), b.begin()));
        }
        // Relative order matches first occurrence in the flattened raw trace.
        std::vector<std::string> firsts;
        for (const auto* f : flatten_frames(t)) {
            if (!matches_prefix(f->class_fqn, "app")) continue;
            const auto id = f->method_id().str();
            if (std::find(firsts.begin(), firsts.end(), id) == firsts.end()) firsts.push_back(id);
        }
        REQUIRE(firsts.size() == view.methods.size());
        for (std::size_t k = 0; k < firsts.size(); ++k) CHECK(view.methods[k].str() == firsts[k]);
    }
}
