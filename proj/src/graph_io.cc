#include "blocksketch/graph_io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "blocksketch/error.h"

namespace blocksketch {
namespace {

bool ParseInt64(const std::string& token, std::int64_t* value) {
  if (token.empty()) return false;
  std::size_t pos = 0;
  try {
    *value = std::stoll(token, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == token.size();
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

void WriteGraph(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.first << ' ' << e.second << '\n';
  if (g.truth().has_value()) {
    out << "labels";
    for (Label l : *g.truth()) out << ' ' << LabelSign(l);
    out << '\n';
  }
}

void WriteGraphFile(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  WriteGraph(out, g);
  if (!out) throw ParseError("write failed: " + path);
}

Graph ReadGraph(std::istream& in) {
  std::string line;
  std::int64_t line_no = 0;
  auto next_line = [&](std::vector<std::string>* toks) {
    while (std::getline(in, line)) {
      ++line_no;
      *toks = Tokens(line);
      if (!toks->empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("graph file line " + std::to_string(line_no) + ": " +
                      what);
  };

  std::vector<std::string> toks;
  if (!next_line(&toks)) throw ParseError("graph file: empty input");
  std::int64_t n = 0, m = 0;
  if (toks.size() != 2 || !ParseInt64(toks[0], &n) ||
      !ParseInt64(toks[1], &m) || n < 0 || m < 0) {
    throw fail("expected header 'n m'");
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    if (!next_line(&toks)) throw fail("expected " + std::to_string(m) +
                                      " edges, found " + std::to_string(i));
    std::int64_t u = 0, v = 0;
    if (toks.size() != 2 || !ParseInt64(toks[0], &u) ||
        !ParseInt64(toks[1], &v)) {
      throw fail("expected edge 'u v'");
    }
    if (u < 0 || v < 0 || u >= n || v >= n) throw fail("endpoint out of range");
    if (u == v) throw fail("self-loop");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }

  std::optional<LabelVector> truth;
  if (next_line(&toks)) {
    if (toks[0] != "labels") throw fail("unexpected content after edges");
    if (static_cast<std::int64_t>(toks.size()) != n + 1) {
      throw fail("labels line needs exactly n entries");
    }
    truth.emplace();
    truth->reserve(static_cast<std::size_t>(n));
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (toks[i] == "1" || toks[i] == "+1") {
        truth->push_back(Label::kPlus);
      } else if (toks[i] == "-1") {
        truth->push_back(Label::kMinus);
      } else {
        throw fail("label must be 1 or -1");
      }
    }
    if (next_line(&toks)) throw fail("trailing content");
  }

  try {
    return Graph(n, std::move(edges), std::move(truth));
  } catch (const ParameterError& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
}

Graph ReadGraphFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return ReadGraph(in);
}

}  // namespace blocksketch
