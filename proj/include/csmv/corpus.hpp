#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace csmv {

enum class Opinion { positive = 0, neutral = 1, negative = 2 };
enum class Emotion { fear = 0, disgust, anger, sadness, joy, trust, anticipation, surprise };

inline constexpr int kNumOpinions = 3;
inline constexpr int kNumEmotions = 8;

const std::array<std::string, kNumOpinions>& opinion_names();
const std::array<std::string, kNumEmotions>& emotion_names();

Opinion parse_opinion(const std::string& s);  // throws UnknownLabel
Emotion parse_emotion(const std::string& s);  // throws UnknownLabel

struct CommentRecord {
    std::string comment_id;
    std::string video_id;
    std::string text;  // UTF-8, non-empty after trimming
    Opinion opinion;
    Emotion emotion;
};

// Comment file: one JSON object per line with keys comment_id, video_id,
// text, opinion, emotion. Parse preserves line order.
std::vector<CommentRecord> read_comments(const std::filesystem::path& path);
void write_comments(const std::filesystem::path& path, const std::vector<CommentRecord>& comments);

struct CorpusIndex {
    // video_id -> feature file path relative to the index file's directory
    std::map<std::string, std::string> videos;
    std::vector<CommentRecord> comments;
    std::filesystem::path root;  // directory the relative feature paths resolve against

    std::filesystem::path feature_path(const std::string& video_id) const;
};

// Loads <dir>/index.json + <dir>/comments.jsonl and verifies referential
// integrity (every comment's video_id resolves, ids unique).
CorpusIndex load_corpus(const std::filesystem::path& dir);

void write_corpus_index(const std::filesystem::path& path, const std::map<std::string, std::string>& videos);

struct LabelDistribution {
    std::array<double, kNumOpinions> opinion;   // fractions, sum 1
    std::array<double, kNumEmotions> emotion;   // fractions, sum 1
    std::array<long, kNumOpinions> opinion_counts;
    std::array<long, kNumEmotions> emotion_counts;
    long total = 0;
};

LabelDistribution label_distribution(const std::vector<CommentRecord>& comments);  // throws EmptyCorpus

struct ConsistencyResult {
    double rate = 0.0;
    bool flagged = false;  // strict ">" against the 0.10 threshold
    long disagreements = 0;
    long total = 0;
};

// An item counts as inconsistent when the original label differs from either
// validator's label.
ConsistencyResult consistency_check(const std::vector<std::string>& original,
                                    const std::vector<std::string>& validator_a,
                                    const std::vector<std::string>& validator_b);

}  // namespace csmv
