#include "csmv/corpus.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "csmv/errors.hpp"

namespace csmv {

using nlohmann::json;

const std::array<std::string, kNumOpinions>& opinion_names() {
    static const std::array<std::string, kNumOpinions> names = {"positive", "neutral", "negative"};
    return names;
}

const std::array<std::string, kNumEmotions>& emotion_names() {
    static const std::array<std::string, kNumEmotions> names = {"fear", "disgust",      "anger", "sadness",
                                                                "joy",  "trust", "anticipation", "surprise"};
    return names;
}

Opinion parse_opinion(const std::string& s) {
    const auto& names = opinion_names();
    for (int i = 0; i < kNumOpinions; ++i) {
        if (names[static_cast<std::size_t>(i)] == s) return static_cast<Opinion>(i);
    }
    throw UnknownLabel("unknown opinion label '" + s + "'");
}

Emotion parse_emotion(const std::string& s) {
    const auto& names = emotion_names();
    for (int i = 0; i < kNumEmotions; ++i) {
        if (names[static_cast<std::size_t>(i)] == s) return static_cast<Emotion>(i);
    }
    throw UnknownLabel("unknown emotion label '" + s + "'");
}

namespace {

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw MissingField(where + ": missing or non-string field '" + key + "'");
    return obj[key].get<std::string>();
}

}  // namespace

std::vector<CommentRecord> read_comments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open comment file " + path.string());

    std::vector<CommentRecord> out;
    std::set<std::string> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(line_no);

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": invalid record: " + e.what());
        }
        if (!obj.is_object()) throw DataError(where + ": record is not an object");

        CommentRecord rec;
        rec.comment_id = require_string(obj, "comment_id", where);
        rec.video_id = require_string(obj, "video_id", where);
        rec.text = require_string(obj, "text", where);
        if (trimmed(rec.text).empty())
            throw MissingField(where + ": empty text (comment_id=" + rec.comment_id + ")");
        try {
            rec.opinion = parse_opinion(require_string(obj, "opinion", where));
            rec.emotion = parse_emotion(require_string(obj, "emotion", where));
        } catch (const UnknownLabel& e) {
            throw UnknownLabel(where + " (comment_id=" + rec.comment_id + "): " + e.what());
        }
        if (!seen.insert(rec.comment_id).second)
            throw DuplicateId(where + ": duplicate comment_id '" + rec.comment_id + "'");
        out.push_back(std::move(rec));
    }
    return out;
}

void write_comments(const std::filesystem::path& path, const std::vector<CommentRecord>& comments) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (const auto& rec : comments) {
        json obj;
        obj["comment_id"] = rec.comment_id;
        obj["video_id"] = rec.video_id;
        obj["text"] = rec.text;
        obj["opinion"] = opinion_names()[static_cast<std::size_t>(rec.opinion)];
        obj["emotion"] = emotion_names()[static_cast<std::size_t>(rec.emotion)];
        out << obj.dump() << "\n";
    }
    if (!out) throw DataError("short write to " + path.string());
}

std::filesystem::path CorpusIndex::feature_path(const std::string& video_id) const {
    const auto it = videos.find(video_id);
    if (it == videos.end()) throw DataError("video_id '" + video_id + "' not in corpus index");
    return root / it->second;
}

CorpusIndex load_corpus(const std::filesystem::path& dir) {
    CorpusIndex corpus;
    corpus.root = dir;

    const auto index_path = dir / "index.json";
    std::ifstream in(index_path);
    if (!in) throw DataError("cannot open corpus index " + index_path.string());
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(index_path.string() + ": " + e.what());
    }
    if (!obj.is_object()) throw DataError(index_path.string() + ": expected an object of video_id -> path");
    for (const auto& [vid, rel] : obj.items()) {
        if (!rel.is_string()) throw DataError(index_path.string() + ": path for '" + vid + "' is not a string");
        if (!corpus.videos.emplace(vid, rel.get<std::string>()).second)
            throw DuplicateId(index_path.string() + ": duplicate video_id '" + vid + "'");
    }

    corpus.comments = read_comments(dir / "comments.jsonl");
    for (const auto& rec : corpus.comments) {
        if (corpus.videos.find(rec.video_id) == corpus.videos.end())
            throw DataError("comment '" + rec.comment_id + "' references unknown video_id '" + rec.video_id + "'");
    }
    return corpus;
}

void write_corpus_index(const std::filesystem::path& path, const std::map<std::string, std::string>& videos) {
    json obj = json::object();
    for (const auto& [vid, rel] : videos) obj[vid] = rel;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << obj.dump(2) << "\n";
}

LabelDistribution label_distribution(const std::vector<CommentRecord>& comments) {
    if (comments.empty()) throw EmptyCorpus("label_distribution: no comments");
    LabelDistribution dist{};
    dist.total = static_cast<long>(comments.size());
    for (const auto& rec : comments) {
        ++dist.opinion_counts[static_cast<std::size_t>(rec.opinion)];
        ++dist.emotion_counts[static_cast<std::size_t>(rec.emotion)];
    }
    for (int i = 0; i < kNumOpinions; ++i)
        dist.opinion[static_cast<std::size_t>(i)] =
            static_cast<double>(dist.opinion_counts[static_cast<std::size_t>(i)]) / static_cast<double>(dist.total);
    for (int i = 0; i < kNumEmotions; ++i)
        dist.emotion[static_cast<std::size_t>(i)] =
            static_cast<double>(dist.emotion_counts[static_cast<std::size_t>(i)]) / static_cast<double>(dist.total);
    return dist;
}

ConsistencyResult consistency_check(const std::vector<std::string>& original,
                                    const std::vector<std::string>& validator_a,
                                    const std::vector<std::string>& validator_b) {
    if (original.size() != validator_a.size() || original.size() != validator_b.size())
        throw LengthMismatch("consistency_check: lists must be aligned (got " + std::to_string(original.size()) +
                             ", " + std::to_string(validator_a.size()) + ", " + std::to_string(validator_b.size()) +
                             ")");
    ConsistencyResult res;
    res.total = static_cast<long>(original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (original[i] != validator_a[i] || original[i] != validator_b[i]) ++res.disagreements;
    }
    res.rate = res.total == 0 ? 0.0 : static_cast<double>(res.disagreements) / static_cast<double>(res.total);
    res.flagged = res.rate > 0.10;
    return res;
}

}  // namespace csmv
