#include "xgw/app/fetch.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xgw/error.hpp"
#include "xgw/llm.hpp"

namespace xgw::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Source {
 public:
  explicit Source(const std::string& source) {
    if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) {
      url_ = parse_endpoint_url(source);
      if (!url_->path.empty() && url_->path.back() == '/') url_->path.pop_back();
      client_ = std::make_unique<httplib::Client>(url_->scheme + "://" + url_->host + ":" +
                                                  std::to_string(url_->port));
      client_->set_follow_location(true);
      client_->set_read_timeout(60, 0);
    } else {
      dir_ = source;
      if (!fs::is_directory(dir_)) {
        throw Error(ErrorCode::kConfiguration, "fetch source is not a directory or url", source);
      }
    }
  }

  // Empty when the resource does not exist.
  std::optional<std::string> get(const std::string& relative) {
    if (!client_) {
      std::ifstream in(dir_ / relative, std::ios::binary);
      if (!in) return std::nullopt;
      std::ostringstream buffer;
      buffer << in.rdbuf();
      return buffer.str();
    }
    const auto res = client_->Get(url_->path + "/" + relative);
    if (!res) {
      throw Error(ErrorCode::kIo, "download failed: " + httplib::to_string(res.error()), relative);
    }
    if (res->status == 404) return std::nullopt;
    if (res->status != 200) {
      throw Error(ErrorCode::kIo, "download failed with status " + std::to_string(res->status),
                  relative);
    }
    return res->body;
  }

 private:
  std::optional<EndpointUrl> url_;
  std::unique_ptr<httplib::Client> client_;
  fs::path dir_;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string nested(const json& doc, const char* outer, const char* inner) {
  if (doc.contains(outer) && doc[outer].is_object() && doc[outer].contains(inner) &&
      doc[outer][inner].is_string()) {
    return doc[outer][inner].get<std::string>();
  }
  return {};
}

}  // namespace

FetchReport fetch_competition(const FetchRequest& request) {
  if (request.target_id.empty() || request.target_id.find('/') != std::string::npos) {
    throw Error(ErrorCode::kConfiguration, "invalid target competition id", request.target_id);
  }
  Source source(request.source);
  const auto listing = source.get("matches/" + request.competition + "/" + request.season + ".json");
  if (!listing) {
    throw Error(ErrorCode::kNotFound, "no match list for competition " + request.competition +
                                          " season " + request.season);
  }
  const json matches = json::parse(*listing, nullptr, false);
  if (!matches.is_array()) throw Error(ErrorCode::kParse, "match list is not a JSON array");

  FetchReport report;
  const fs::path root = request.data_root / request.target_id;
  for (const json& m : matches) {
    if (!m.contains("match_id")) continue;
    const std::string id = m["match_id"].is_string() ? m["match_id"].get<std::string>()
                                                     : std::to_string(m["match_id"].get<long long>());
    const fs::path dir = root / id;
    ++report.matches;
    if (report.matches == 1) {
      const std::string name = nested(m, "competition", "competition_name");
      const std::string season = nested(m, "season", "season_name");
      json meta = {{"name", season.empty() ? name : name + " " + season}};
      if (!fs::exists(root / "competition.json")) write_file(root / "competition.json", meta.dump(2));
    }
    if (!fs::exists(dir / "match.json")) {
      json meta = {{"home_team", nested(m, "home_team", "home_team_name")},
                   {"away_team", nested(m, "away_team", "away_team_name")}};
      write_file(dir / "match.json", meta.dump(2));
    }
    for (const auto& [remote, local] :
         {std::pair<std::string, std::string>{"events/", "events.json"},
          std::pair<std::string, std::string>{"three-sixty/", "three-sixty.json"}}) {
      if (fs::exists(dir / local)) {
        ++report.cached;
        continue;
      }
      const auto body = source.get(remote + id + ".json");
      if (!body) {
        if (local == "events.json") throw Error(ErrorCode::kNotFound, "no events for match", id);
        ++report.missing_frames;
        continue;
      }
      write_file(dir / local, *body);
      ++report.downloaded;
    }
  }
  return report;
}

}  // namespace xgw::app
