#include "esdp/errors.h"
#include "esdp/extractor.h"
#include "oracles.h"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <string>

using namespace esdp;

namespace {

std::vector<std::string> dump(const std::vector<SourceItem>& items) {
    std::vector<std::string> out;
    for (const auto& it : items) out.push_back(format_key(it.key()));
    return out;
}

bool has_item(const ExtractResult& r, ItemKind kind, const std::string& name) {
    return std::any_of(r.items.begin(), r.items.end(),
                       [&](const SourceItem& it) { return it.kind == kind && it.name == name; });
}

std::string in_method(const std::string& body) {
    return "package foo.biz;\nclass Holder {\n  void run() {\n" + body + "\n  }\n}\n";
}

const char* kSearchTest = R"(public class SearchTest
{
    private ASTParser parser;
    private CompilationUnit cu;

    protected CompilationUnit parse(ICompilationUnit lwUnit)
    {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(lwUnit);
        parser.setResolveBindings(true);
        cu = (CompilationUnit) parser.createAST(null);
        return cu;
    }
}
)";

} // namespace

TEST_CASE("empty source yields nothing") {
    auto r = extract_items("", "Empty.java");
    CHECK(r.items.empty());
    CHECK(r.markers.empty());
}

TEST_CASE("field declaration carries class path and line") {
    auto r = extract_items("package com;\n\nclass Test {\n\n  private Connection conn;\n}\n", "Test.java");
    auto fd = std::find_if(r.items.begin(), r.items.end(), [](const SourceItem& it) { return it.kind == ItemKind::FD; });
    REQUIRE(fd != r.items.end());
    CHECK(fd->name == "Connection");
    CHECK(fd->enclosing == "com.Test");
    CHECK(fd->line == 5);
}

TEST_CASE("parser walkthrough body") {
    auto r = extract_items(kSearchTest, "SearchTest.java");
    std::vector<std::string> body;
    for (const auto& it : r.items) {
        if (it.method_block.empty() || it.kind == ItemKind::MD) continue;
        body.push_back(format_key(it.key()));
    }
    CHECK(body == std::vector<std::string>{
                      "MI#ASTParser.newParser(int)",
                      "MI#aSTParser.setKind(int)",
                      "MI#aSTParser.setSource(ICompilationUnit)",
                      "MI#aSTParser.setResolveBindings(boolean)",
                      "MI#aSTParser.createAST(null)",
                      "RT#CompilationUnit",
                  });
}

TEST_CASE("every item kind has a snippet producing it") {
    SUBCASE("file and type level kinds") {
        auto r = extract_items("package foo.biz;\nimport java.io.File;\n"
                               "public class Example_Class extends SuperClass implements Runnable {\n"
                               "  private Connection conn;\n"
                               "  public File method(String s) { return null; }\n"
                               "}\n",
                               "Example_Class.java");
        CHECK(has_item(r, ItemKind::PD, "foo.biz"));
        CHECK(has_item(r, ItemKind::ID, "java.io.File"));
        CHECK(has_item(r, ItemKind::TD, "Example_Class"));
        CHECK(has_item(r, ItemKind::SC, "SuperClass"));
        CHECK(has_item(r, ItemKind::II, "Runnable"));
        CHECK(has_item(r, ItemKind::FD, "Connection"));
        CHECK(has_item(r, ItemKind::MD, "method(String)"));
    }
    SUBCASE("constructor chaining") {
        auto r = extract_items("class Base extends Root {\n"
                               "  Base(int parameter) { super(parameter); }\n"
                               "  Base() { this(1); }\n"
                               "}\n",
                               "Base.java");
        CHECK(has_item(r, ItemKind::SCI, "super(int)"));
        CHECK(has_item(r, ItemKind::CTI, "this(int)"));
    }
    SUBCASE("statement level kinds") {
        auto r = extract_items(in_method("    String s = \"\";\n"
                                         "    File f = new File(\"x\");\n"
                                         "    Opener method = null;\n"
                                         "    method.open(s);\n"
                                         "    Enumeration e = new Enumeration() { };\n"
                                         "    int[] array = null;\n"
                                         "    int i = 0;\n"
                                         "    array[i]++;\n"
                                         "    File[] files = new File[i];\n"
                                         "    Holder object = null;\n"
                                         "    object.field_A = 2;\n"
                                         "    return;"),
                               "Holder.java");
        CHECK(has_item(r, ItemKind::VD, "String"));
        CHECK(has_item(r, ItemKind::CI, "File(String)"));
        CHECK(has_item(r, ItemKind::MI, "opener.open(String)"));
        CHECK(has_item(r, ItemKind::ACD, "Enumeration"));
        CHECK(has_item(r, ItemKind::AA, "int[]"));
        CHECK(has_item(r, ItemKind::AC, "File[]"));
        CHECK(has_item(r, ItemKind::FA, "holder.field_A"));
    }
    SUBCASE("return names the returned type") {
        auto r = extract_items("class R { File get() { File aFile = null; return aFile; } }", "R.java");
        CHECK(has_item(r, ItemKind::RT, "File"));
    }
}

TEST_CASE("the kind table covers exactly seventeen kinds") {
    std::set<std::string> names;
    for (auto k : kAllItemKinds) {
        names.insert(std::string(to_string(k)));
        CHECK(parse_item_kind(to_string(k)) == k);
    }
    CHECK(names.size() == 17);
    CHECK_FALSE(parse_item_kind("IF").has_value());
}

TEST_CASE("normalize_item drops variable identifiers") {
    CHECK(normalize_item(ItemKind::FD, "Connection connection", "") == "Connection");
    CHECK(normalize_item(ItemKind::FD, "Connection conn", "") == "Connection");
    CHECK(normalize_item(ItemKind::MI, "parser.setKind(int)", "ASTParser") == "aSTParser.setKind(int)");
    CHECK(normalize_item(ItemKind::MI, "x.close()", "") == "unknown.close()");
}

TEST_CASE("type name helpers") {
    CHECK(lower_camel("ASTParser") == "aSTParser");
    CHECK(lower_camel("dom.ASTParser") == "aSTParser");
    CHECK(lower_camel("File[]") == "file[]");
    CHECK(simple_type_name("org.eclipse.jdt.core.dom.ASTParser") == "ASTParser");

    ImportTable imports({"org.eclipse.jdt.core.dom.ASTParser", "a.one.Thing", "b.two.Thing"});
    CHECK(resolve_type("ASTParser", imports) == "dom.ASTParser");
    CHECK(resolve_type("List<ASTParser>", imports) == "List");
    CHECK(resolve_type("ASTParser[]", imports) == "dom.ASTParser[]");
    CHECK(resolve_type("Thing", imports) == "Thing");
    CHECK(resolve_type("java.util.List", imports) == "util.List");
}

TEST_CASE("simple names resolve through unambiguous imports only") {
    auto r = extract_items("import a.one.Thing;\nimport b.two.Thing;\nimport c.three.Widget;\n"
                           "class A { void m() { Thing t = new Thing(); Widget w = new Widget(); w.spin(); } }",
                           "A.java");
    CHECK(has_item(r, ItemKind::CI, "Thing()"));
    CHECK(has_item(r, ItemKind::CI, "three.Widget()"));
    CHECK(has_item(r, ItemKind::MI, "widget.spin()"));
}

TEST_CASE("undeclared receivers render as unknown") {
    auto r = extract_items(in_method("    mystery.go(1);"), "Holder.java");
    CHECK(has_item(r, ItemKind::MI, "unknown.go(int)"));
}

TEST_CASE("items are ordered by line and column") {
    auto r = extract_items(kSearchTest, "SearchTest.java");
    CHECK(std::is_sorted(r.items.begin(), r.items.end(), [](const SourceItem& a, const SourceItem& b) {
        return std::pair(a.line, a.column) < std::pair(b.line, b.column);
    }));
    CHECK(std::all_of(r.items.begin(), r.items.end(), [](const SourceItem& it) { return !it.enclosing.empty(); }));
}

TEST_CASE("control constructs become balanced markers") {
    auto r = extract_items(in_method("    for (int i = 0; i < 3; i++) {\n"
                                     "      if (i > 1) { a.b(); } else { c.d(); }\n"
                                     "    }\n"
                                     "    while (true) { }\n"
                                     "    do { } while (false);"),
                           "Holder.java");
    std::vector<ControlMarker::Kind> kinds;
    for (const auto& m : r.markers) kinds.push_back(m.kind);
    using K = ControlMarker::Kind;
    CHECK(kinds == std::vector<K>{K::LoopBegin, K::IfBegin, K::IfEnd, K::LoopEnd, K::LoopBegin, K::LoopEnd,
                                  K::LoopBegin, K::LoopEnd});
}

TEST_CASE("lexical and bracket failures report their position") {
    SUBCASE("unbalanced brace") {
        try {
            extract_items("class A {\n  void m() {\n", "A.java");
            FAIL("expected UnparsableSource");
        } catch (const UnparsableSource& e) {
            CHECK(e.line() >= 1);
            CHECK(e.name() == "UnparsableSource");
        }
    }
    SUBCASE("unterminated string") {
        try {
            extract_items("class A {\n  String s = \"abc\n}\n", "A.java");
            FAIL("expected UnparsableSource");
        } catch (const UnparsableSource& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() == 14);
        }
    }
    SUBCASE("stray closing brace") {
        CHECK_THROWS_AS(extract_items("class A { } }", "A.java"), UnparsableSource);
    }
}

TEST_CASE("unsupported statement forms are skipped without error") {
    auto r = extract_items(in_method("    assert n > 0;\n"
                                     "    switch (n) { case 1: foo.bar(); break; default: break; }\n"
                                     "    label: for (;;) { break label; }\n"
                                     "    synchronized (this) { w.stop(); }\n"
                                     "    Widget w = new Widget();"),
                           "Holder.java");
    CHECK(has_item(r, ItemKind::CI, "Widget()"));
}

TEST_CASE("renaming local variables leaves item identities unchanged") {
    const std::string tmpl = "import org.x.dom.ASTParser;\n"
                             "class T {\n"
                             "  Object run(ICompilationUnit $U) {\n"
                             "    ASTParser $P = ASTParser.newParser(3);\n"
                             "    $P.setSource($U);\n"
                             "    int $I = 0;\n"
                             "    for (int $J = 0; $J < $I; $J++) { $P.setKind($J); }\n"
                             "    Object $R = $P.createAST(null);\n"
                             "    return $R;\n"
                             "  }\n"
                             "}\n";
    auto instantiate = [&](const std::map<std::string, std::string>& names) {
        std::string s = tmpl;
        for (const auto& [hole, name] : names) {
            for (auto pos = s.find(hole); pos != std::string::npos; pos = s.find(hole, pos)) s.replace(pos, hole.size(), name);
        }
        return s;
    };
    auto identities = [](const ExtractResult& r) {
        std::multiset<ItemKey> keys;
        for (const auto& it : r.items) keys.insert(it.key());
        return keys;
    };
    std::mt19937_64 rng(7);
    auto fresh = [&](int i) {
        std::string s = "v";
        for (int c = 0; c < 5; ++c) s += static_cast<char>('a' + rng() % 26);
        return s + std::to_string(i);
    };
    auto base = identities(extract_items(instantiate({{"$U", "u"}, {"$P", "p"}, {"$I", "i"}, {"$J", "j"}, {"$R", "r"}}), "T.java"));
    CHECK(base.count({ItemKind::MI, "aSTParser.setKind(int)"}) == 1);
    for (int round = 0; round < 25; ++round) {
        auto renamed = instantiate({{"$U", fresh(0)}, {"$P", fresh(1)}, {"$I", fresh(2)}, {"$J", fresh(3)}, {"$R", fresh(4)}});
        CHECK(identities(extract_items(renamed, "T.java")) == base);
    }
}

TEST_CASE("statement snippets use the supplied scope") {
    ScopeContext ctx;
    ctx.imports = {"org.eclipse.jdt.core.dom.ASTParser"};
    ctx.variables = {{"parser", "ASTParser"}};
    auto r = extract_statements("parser = ASTParser.newParser(AST.JLS3);\nparser.setKind(0);", ctx);
    CHECK(dump(r.items) == std::vector<std::string>{"MI#dom.ASTParser.newParser(int)", "MI#aSTParser.setKind(int)"});

    auto field = extract_statements("private Connection conn;", ScopeContext{});
    CHECK(dump(field.items) == std::vector<std::string>{"FD#Connection"});
}

TEST_CASE("item dump is tab separated") {
    auto r = extract_items("package com;\nclass Test {\n  private Connection conn;\n}\n", "Test.java");
    auto text = format_item_dump(r.items);
    CHECK(text.find("FD\tConnection\tcom.Test\t3\n") != std::string::npos);
}

TEST_CASE("corpus discovery filters by extension and sorts by label") {
    auto root = std::filesystem::temp_directory_path() / "esdp_discover_test";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root / "b");
    std::ofstream(root / "b" / "Z.java") << "class Z { }";
    std::ofstream(root / "A.java") << "class A { }";
    std::ofstream(root / "notes.txt") << "x";
    auto files = discover_sources({root});
    REQUIRE(files.size() == 2);
    CHECK(files[0].label == "A.java");
    CHECK(files[1].label == "b/Z.java");
    auto all = extract_corpus(files);
    CHECK(dump(all.items) == std::vector<std::string>{"TD#A", "TD#Z"});
    std::filesystem::remove_all(root);
}

TEST_CASE("fixture corpus extracts cleanly") {
    auto files = discover_sources({oracle::fixture_dir("astparser")});
    CHECK(files.size() == 4);
    CHECK_NOTHROW(extract_corpus(files));
}
