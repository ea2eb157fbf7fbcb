#include "lowspace/turing.hpp"

#include <fstream>
#include <sstream>

#include "lowspace/error.hpp"

namespace lowspace {

TuringMachine::TuringMachine(std::size_t tapes, std::size_t states, std::uint32_t start, std::uint32_t accept,
                             std::uint32_t reject, std::string alphabet)
    : k_(tapes), states_(states), start_(start), accept_(accept), reject_(reject), alphabet_(std::move(alphabet)) {
    if (k_ < 1 || k_ > 4)
        throw ParamError("tape count must be in [1, 4]");
    if (states_ < 1 || start_ >= states_ || accept_ >= states_ || reject_ >= states_)
        throw ParamError("start, accept and reject must be states");
    if (alphabet_.empty() || alphabet_.size() > 16)
        throw ParamError("alphabet must have 1 to 16 symbols");
    std::size_t combos = 1;
    for (std::size_t i = 0; i < k_; ++i)
        combos *= alphabet_.size();
    table_.resize(states_ * combos);
}

std::size_t TuringMachine::key(std::uint32_t q, const std::vector<std::uint8_t> &read) const {
    std::size_t code = q;
    for (auto s : read)
        code = code * alphabet_.size() + s;
    return code;
}

void TuringMachine::set(std::uint32_t q, const std::vector<std::uint8_t> &read, Transition tr) {
    if (q >= states_ || read.size() != k_ || tr.write.size() != k_ || tr.moves.size() != k_ || tr.next >= states_)
        throw ParamError("malformed transition");
    for (std::size_t i = 0; i < k_; ++i)
        if (read[i] >= alphabet_.size() || tr.write[i] >= alphabet_.size())
            throw ParamError("transition symbol outside the alphabet");
    table_[key(q, read)] = std::move(tr);
}

const Transition *TuringMachine::delta(std::uint32_t q, const std::vector<std::uint8_t> &read) const {
    const auto &slot = table_[key(q, read)];
    return slot ? &*slot : nullptr;
}

void TuringMachine::check_total() const {
    std::vector<std::uint8_t> read(k_, 0);
    for (std::uint32_t q = 0; q < states_; ++q) {
        if (is_halting(q))
            continue;
        std::fill(read.begin(), read.end(), 0);
        while (true) {
            if (!delta(q, read)) {
                std::string syms;
                for (auto s : read)
                    syms.push_back(alphabet_[s]);
                throw ParseError(0, "no transition for state " + std::to_string(q) + " reading '" + syms + "'");
            }
            std::size_t i = 0;
            for (; i < k_; ++i) {
                if (++read[i] < alphabet_.size())
                    break;
                read[i] = 0;
            }
            if (i == k_)
                break;
        }
    }
}

namespace {

std::size_t header_int(const std::string &token, const std::string &name, std::size_t line) {
    const std::string prefix = name + "=";
    if (token.rfind(prefix, 0) != 0)
        throw ParseError(line, "expected " + prefix + "<int>, got '" + token + "'");
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(token.substr(prefix.size()), &pos);
        if (pos != token.size() - prefix.size())
            throw std::invalid_argument(token);
        return v;
    } catch (const std::logic_error &) {
        throw ParseError(line, "bad integer in '" + token + "'");
    }
}

} // namespace

TuringMachine parse_tm(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    std::optional<TuringMachine> m;
    while (std::getline(in, raw)) {
        ++line_no;
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;)
            tok.push_back(w);
        if (tok.empty() || tok[0][0] == '#')
            continue;
        if (!m) {
            if (tok.size() != 7 || tok[0] != "tm")
                throw ParseError(line_no, "expected header 'tm k= states= start= accept= reject= alphabet='");
            const auto k = header_int(tok[1], "k", line_no);
            const auto states = header_int(tok[2], "states", line_no);
            const auto start = header_int(tok[3], "start", line_no);
            const auto accept = header_int(tok[4], "accept", line_no);
            const auto reject = header_int(tok[5], "reject", line_no);
            if (tok[6].rfind("alphabet=", 0) != 0 || tok[6].size() <= 9)
                throw ParseError(line_no, "expected alphabet=<chars>");
            try {
                m.emplace(k, states, static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(accept),
                          static_cast<std::uint32_t>(reject), tok[6].substr(9));
            } catch (const ParamError &e) {
                throw ParseError(line_no, e.what());
            }
            continue;
        }
        const std::size_t k = m->tapes();
        if (tok.size() != 6 || tok[2] != "->")
            throw ParseError(line_no, "expected '<state> <symbols> -> <state> <symbols> <moves>'");
        auto state = [&](const std::string &s) {
            try {
                std::size_t pos = 0;
                const auto v = std::stoul(s, &pos);
                if (pos != s.size() || v >= m->num_states())
                    throw std::invalid_argument(s);
                return static_cast<std::uint32_t>(v);
            } catch (const std::logic_error &) {
                throw ParseError(line_no, "bad state '" + s + "'");
            }
        };
        auto symbols = [&](const std::string &s) {
            if (s.size() != k)
                throw ParseError(line_no, "expected " + std::to_string(k) + " symbols, got '" + s + "'");
            std::vector<std::uint8_t> out;
            for (char ch : s) {
                const auto pos = m->alphabet().find(ch);
                if (pos == std::string::npos)
                    throw ParseError(line_no, std::string("symbol '") + ch + "' not in the alphabet");
                out.push_back(static_cast<std::uint8_t>(pos));
            }
            return out;
        };
        Transition tr;
        const auto q = state(tok[0]);
        const auto read = symbols(tok[1]);
        tr.next = state(tok[3]);
        tr.write = symbols(tok[4]);
        if (tok[5].size() != k)
            throw ParseError(line_no, "expected " + std::to_string(k) + " moves");
        for (char ch : tok[5]) {
            switch (ch) {
            case 'L': tr.moves.push_back(Move::L); break;
            case 'R': tr.moves.push_back(Move::R); break;
            case 'S': tr.moves.push_back(Move::S); break;
            default: throw ParseError(line_no, std::string("bad move '") + ch + "'");
            }
        }
        if (m->is_halting(q))
            throw ParseError(line_no, "transition out of a halting state");
        if (m->delta(q, read))
            throw ParseError(line_no, "duplicate transition");
        m->set(q, read, std::move(tr));
    }
    if (!m)
        throw ParseError(line_no, "missing tm header");
    m->check_total();
    return *m;
}

TuringMachine read_tm_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tm(ss.str());
}

std::string serialize_tm(const TuringMachine &m) {
    std::ostringstream out;
    out << "tm k=" << m.tapes() << " states=" << m.num_states() << " start=" << m.start() << " accept=" << m.accept()
        << " reject=" << m.reject() << " alphabet=" << m.alphabet() << "\n";
    const std::size_t k = m.tapes(), n = m.num_symbols();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < k; ++i)
        combos *= n;
    std::vector<std::uint8_t> read(k, 0);
    for (std::uint32_t q = 0; q < m.num_states(); ++q) {
        for (std::size_t code = 0; code < combos; ++code) {
            for (std::size_t i = 0, rest = code; i < k; ++i, rest /= n)
                read[k - 1 - i] = static_cast<std::uint8_t>(rest % n);
            const Transition *tr = m.delta(q, read);
            if (!tr)
                continue;
            out << q << ' ';
            for (auto s : read)
                out << m.alphabet()[s];
            out << " -> " << tr->next << ' ';
            for (auto s : tr->write)
                out << m.alphabet()[s];
            out << ' ';
            for (auto mv : tr->moves)
                out << (mv == Move::L ? 'L' : mv == Move::R ? 'R' : 'S');
            out << '\n';
        }
    }
    return out.str();
}

Configuration initial_configuration(const TuringMachine &m, const BitVector &input, std::size_t t, std::size_t offset) {
    if (offset + input.size() > t || offset >= t)
        throw ParamError("input does not fit the tape window");
    if (m.num_symbols() < 3 && !input.empty())
        throw ParamError("binary input needs at least three tape symbols");
    Configuration cfg;
    cfg.state = m.start();
    cfg.tapes.assign(m.tapes(), std::vector<std::uint8_t>(t, 0));
    cfg.heads.assign(m.tapes(), offset);
    for (std::size_t i = 0; i < input.size(); ++i)
        cfg.tapes[0][offset + i] = m.input_symbol(input.get(i));
    return cfg;
}

Configuration simulate_direct(const TuringMachine &m, Configuration cfg, std::size_t steps) {
    const std::size_t k = m.tapes();
    std::vector<std::uint8_t> read(k);
    for (std::size_t step = 0; step < steps && !m.is_halting(cfg.state); ++step) {
        for (std::size_t j = 0; j < k; ++j)
            read[j] = cfg.tapes[j][cfg.heads[j]];
        const Transition *tr = m.delta(cfg.state, read);
        if (!tr)
            throw Error("no transition for state " + std::to_string(cfg.state));
        for (std::size_t j = 0; j < k; ++j) {
            cfg.tapes[j][cfg.heads[j]] = tr->write[j];
            const auto h = static_cast<std::ptrdiff_t>(cfg.heads[j]) + static_cast<int>(tr->moves[j]);
            if (h < 0 || h >= static_cast<std::ptrdiff_t>(cfg.tapes[j].size()))
                throw TapeBoundsError("head " + std::to_string(j) + " left the tape window at step " +
                                      std::to_string(step));
            cfg.heads[j] = static_cast<std::size_t>(h);
        }
        cfg.state = tr->next;
    }
    return cfg;
}

std::string to_string(const TuringMachine &m, const Configuration &cfg) {
    std::string out = "state " + std::to_string(cfg.state);
    for (std::size_t j = 0; j < cfg.tapes.size(); ++j) {
        out += "\ntape " + std::to_string(j) + " ";
        for (std::size_t c = 0; c < cfg.tapes[j].size(); ++c) {
            if (c == cfg.heads[j])
                out += '[';
            out += m.alphabet()[cfg.tapes[j][c]];
            if (c == cfg.heads[j])
                out += ']';
        }
    }
    return out;
}

} // namespace lowspace
