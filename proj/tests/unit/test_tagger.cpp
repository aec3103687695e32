#include <doctest.h>

#include <set>

#include "answerability/error.hpp"
#include "answerability/tagger.hpp"
#include "test_support.hpp"

using namespace answerability;
using Tokens = std::vector<std::string>;
using Lexicon = std::unordered_map<std::string, std::string>;

TEST_CASE("tagset has 25 distinct symbols") {
  const auto tags = twitter_tagset();
  CHECK(tags.size() == 25);
  CHECK(std::set<std::string_view>(tags.begin(), tags.end()).size() == 25);
  CHECK(is_twitter_tag("N"));
  CHECK(is_twitter_tag("$"));
  CHECK_FALSE(is_twitter_tag("NN"));
  CHECK_FALSE(is_twitter_tag(""));
}

TEST_CASE("pos_tag examples") {
  const LexiconTagger tagger(Lexicon{{"run", "V"}});
  CHECK(tagger.tag(TokenSequence{}).tags.empty());
  CHECK(tagger.tag(TokenSequence{{"run"}, 3}).tags == Tokens{"V"});
  CHECK(tagger.tag(TokenSequence{{"quickly"}, 7}).tags == Tokens{"R"});
}

TEST_CASE("suffix rules and lexicon precedence") {
  const LexiconTagger tagger(Lexicon{{"Fly", "V"}, {"the", "D"}});
  CHECK(tagger.tag_word("fLY") == "V");
  CHECK(tagger.tag_word("THE") == "D");
  CHECK(tagger.tag_word("jumping") == "V");
  CHECK(tagger.tag_word("cooked") == "V");
  CHECK(tagger.tag_word("ly") == "N");
  CHECK(tagger.tag_word("ed") == "N");
  CHECK(tagger.tag_word("table") == "N");
  CHECK(tagger.tag(tokenize("The dog barked loudly")).tags == Tokens{"D", "N", "V", "R"});
  CHECK_THROWS_AS(LexiconTagger(Lexicon{{"x", "NN"}}), ValidationError);
}

TEST_CASE("tagging is deterministic and one tag per token") {
  const LexiconTagger tagger = LexiconTagger::load(test_support::data_dir() / "tag_lexicon.tsv");
  CHECK(tagger.lexicon_size() > 100);
  const TokenSequence t = tokenize("Why do I think the big dogs are running so quickly today?");
  const TagSequence a = tagger.tag(t), b = tagger.tag(t);
  CHECK(a.tags == b.tags);
  CHECK(a.tags.size() == t.size());
  for (const auto& tag : a.tags) CHECK(is_twitter_tag(tag));
}

TEST_CASE("tag lexicon file errors carry the line number") {
  const auto dir = test_support::scratch_dir("tagger");
  test_support::write_file(dir / "bad.tsv", "# header\nrun\tV\nfoo\tNN\n");
  try {
    LexiconTagger::load(dir / "bad.tsv");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  test_support::write_file(dir / "notab.tsv", "run V\n");
  CHECK_THROWS_AS(LexiconTagger::load(dir / "notab.tsv"), ValidationError);
  CHECK_THROWS_AS(LexiconTagger::load(dir / "missing.tsv"), IoError);
}

TEST_CASE("pre-tagged input replays tags and falls back") {
  const auto dir = test_support::scratch_dir("pretagged");
  test_support::write_file(dir / "tags.tsv", "What\tO\nis\tV\nLDA\t^\n\nhello\t!\n\n\n");
  auto fallback = std::make_shared<LexiconTagger>();
  const PretaggedTagger with_fallback = PretaggedTagger::load(dir / "tags.tsv", fallback);
  CHECK(with_fallback.size() == 2);
  CHECK(with_fallback.tag(tokenize("What is LDA?")).tags == Tokens{"O", "V", "^"});
  CHECK(with_fallback.tag(tokenize("hello")).tags == Tokens{"!"});
  CHECK(with_fallback.tag(tokenize("slowly moving")).tags == Tokens{"R", "V"});
  CHECK(with_fallback.tag(TokenSequence{}).tags.empty());

  const PretaggedTagger strict = PretaggedTagger::load(dir / "tags.tsv");
  CHECK_THROWS_AS(strict.tag(tokenize("what is LDA")), ValidationError);

  test_support::write_file(dir / "bad.tsv", "a\tN\nb\tQQ\n");
  CHECK_THROWS_AS(PretaggedTagger::load(dir / "bad.tsv"), ValidationError);
}
