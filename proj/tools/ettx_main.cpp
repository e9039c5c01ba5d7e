#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ettx/compile.hpp"
#include "ettx/compose.hpp"
#include "ettx/errors.hpp"
#include "ettx/eval.hpp"
#include "ettx/oracle.hpp"
#include "ettx/sst_io.hpp"

using namespace ettx;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Doc read_doc(const std::string& path) {
    std::string raw = read_file(path);
    if (!raw.empty() && raw.back() == '\n') raw.pop_back();
    return utf8_decode(raw);
}

std::string out_line(const Doc& d) {
    std::string s;
    for (Char c : d) {
        if (c == U'\\') s += "\\\\";
        else if (c == U'\n') s += "\\n";
        else s += utf8_encode_char(c);
    }
    return s;
}

std::set<Char> pick_alphabet(const MsreFile& f, const Doc& doc) {
    if (f.alphabet) return *f.alphabet;
    std::set<Char> sigma = expr_chars(f.expr);
    for (Char c : doc) sigma.insert(c);
    return sigma;
}

Dsst load_dsst(const std::string& path) {
    auto d = nsst_as_dsst(parse_nsst(read_file(path)));
    if (!d) throw Error(path + " is not deterministic with an empty start valuation");
    return *d;
}

void print_bag(const Bag<Doc>& b, std::uint64_t limit) {
    std::uint64_t n = 0;
    for (const Doc& d : b.items) {
        if (limit && n++ >= limit) break;
        std::cout << out_line(d) << "\n";
    }
}

struct RunOpts {
    std::string spanner, input;
    std::vector<std::string> transducers;
    std::string strategy = "direct";
    std::uint64_t limit = 0;
    std::uint64_t budget = 1000000;
    std::size_t max_states = 50000;
    bool stats = false;
    bool check_oracle = false;
};

int cmd_run(const RunOpts& o) {
    MsreFile msre = parse_msre(read_file(o.spanner));
    Doc doc = read_doc(o.input);
    std::set<Char> sigma = pick_alphabet(msre, doc);
    Dsst stage1 = load_dsst(o.transducers.at(0));
    std::vector<Nsst> stages;
    for (std::size_t i = 1; i < o.transducers.size(); ++i)
        stages.push_back(parse_nsst(read_file(o.transducers[i])));

    Bag<Doc> result;
    CompileStats cstats;
    EvalStats estats;
    if (o.strategy == "direct") {
        Nsst machine = et_to_nsst(msre.expr, stage1, sigma, &cstats);
        for (const Nsst& st : stages) machine = compose_nsst(machine, st, o.max_states);
        machine = garbage_free_transform(machine);
        result = evaluate(machine, to_word(doc), &estats, o.limit);
        if (o.stats) {
            std::cerr << "states: " << machine.states.size() << "\n"
                      << "transitions: " << machine.delta.size() << "\n"
                      << "bracket-walks: " << cstats.gamma_paths << "\n"
                      << "fired: " << estats.transitions_fired << "\n"
                      << "dag-nodes: " << estats.ecsa_nodes << "\n"
                      << "outputs: " << estats.outputs << "\n"
                      << "max-delay-steps: " << estats.max_delay_steps << "\n"
                      << "max-delay-ratio: " << estats.max_delay_ratio << "\n";
        }
    } else if (o.strategy == "nested") {
        Nsst first = garbage_free_transform(et_to_nsst(msre.expr, stage1, sigma));
        Bag<Doc> bag = evaluate(first, to_word(doc));
        for (const Nsst& st : stages) {
            Nsst g = garbage_free_transform(st);
            Bag<Doc> nx;
            for (const Doc& u : bag.items) {
                Word mid = to_word(u);
                bool fits = true;
                for (const Symbol& s : mid)
                    if (!g.input.count(s)) { fits = false; break; }
                if (!fits) continue;
                for (Doc& v : evaluate(g, mid).items) nx.add(std::move(v));
            }
            bag = std::move(nx);
        }
        result = std::move(bag);
    } else {
        throw Error("unknown strategy " + o.strategy);
    }

    if (o.check_oracle) {
        Budget b{o.budget, o.budget};
        Bag<Doc> ref = oracle::et_bag(msre.expr, stage1, doc, sigma, b);
        for (const Nsst& st : stages) {
            Bag<Doc> nx;
            for (const Doc& u : ref.items) {
                Word mid = to_word(u);
                bool fits = true;
                for (const Symbol& s : mid)
                    if (!st.input.count(s)) { fits = false; break; }
                if (!fits) continue;
                for (const Doc& v : oracle::nsst_bag(st, mid, b).items) nx.add(v);
            }
            ref = std::move(nx);
        }
        if (!bag_eq(result, ref)) {
            std::cerr << "oracle mismatch: got " << result.size() << " outputs, expected "
                      << ref.size() << "\n";
            return 1;
        }
    }
    print_bag(result, o.limit);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extract-transform programs over streaming string transducers"};
    app.require_subcommand(1);

    RunOpts ro;
    CLI::App* run = app.add_subcommand("run", "evaluate a pipeline on a document");
    run->add_option("--spanner", ro.spanner)->required();
    run->add_option("--transducer", ro.transducers)->required();
    run->add_option("--input", ro.input)->required();
    run->add_option("--strategy", ro.strategy)->check(CLI::IsMember({"direct", "nested"}));
    run->add_option("--limit", ro.limit);
    run->add_option("--budget", ro.budget);
    run->add_option("--max-states", ro.max_states);
    run->add_flag("--stats", ro.stats);
    run->add_flag("--oracle", ro.check_oracle);

    std::string spanner, transducer, input, out, first, second;
    std::uint64_t budget = 1000000;
    std::size_t max_states = 50000;

    CLI::App* compile = app.add_subcommand("compile", "fold spanner and transducer into one machine");
    compile->add_option("--spanner", spanner)->required();
    compile->add_option("--transducer", transducer)->required();
    compile->add_option("--out", out)->required();

    CLI::App* compose = app.add_subcommand("compose", "compose two machines");
    compose->add_option("--first", first)->required();
    compose->add_option("--second", second)->required();
    compose->add_option("--out", out)->required();
    compose->add_option("--max-states", max_states);

    CLI::App* check = app.add_subcommand("check", "report machine properties");
    check->add_option("--transducer", transducer)->required();

    CLI::App* orc = app.add_subcommand("oracle", "brute-force evaluation");
    orc->add_option("--spanner", spanner)->required();
    orc->add_option("--transducer", transducer)->required();
    orc->add_option("--input", input)->required();
    orc->add_option("--budget", budget);

    CLI::App* dump = app.add_subcommand("dump-ecsa", "print the enumeration DAG");
    dump->add_option("--transducer", transducer)->required();
    dump->add_option("--input", input)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(ro);
        if (compile->parsed()) {
            MsreFile msre = parse_msre(read_file(spanner));
            if (!msre.alphabet) throw Error("compile needs an explicit alphabet");
            Nsst m = et_to_nsst(msre.expr, load_dsst(transducer), *msre.alphabet);
            std::ofstream of(out, std::ios::binary);
            if (!of) throw Error("cannot write " + out);
            of << serialize_nsst(m);
            return 0;
        }
        if (compose->parsed()) {
            Nsst a = parse_nsst(read_file(first));
            Nsst b = parse_nsst(read_file(second));
            Nsst c = compose_nsst(a, b, max_states);
            std::ofstream of(out, std::ios::binary);
            if (!of) throw Error("cannot write " + out);
            of << serialize_nsst(c);
            return 0;
        }
        if (check->parsed()) {
            Nsst m = parse_nsst(read_file(transducer));
            bool gf = is_garbage_free(m);
            std::cout << "states: " << m.states.size() << "\n"
                      << "transitions: " << m.delta.size() << "\n"
                      << "registers: " << m.registers.size() << "\n"
                      << "garbage-free: " << (gf ? "yes" : "no") << "\n";
            return gf ? 0 : 1;
        }
        if (orc->parsed()) {
            MsreFile msre = parse_msre(read_file(spanner));
            Doc doc = read_doc(input);
            std::set<Char> sigma = pick_alphabet(msre, doc);
            Budget b{budget, budget};
            print_bag(oracle::et_bag(msre.expr, load_dsst(transducer), doc, sigma, b), 0);
            return 0;
        }
        if (dump->parsed()) {
            Nsst m = garbage_free_transform(parse_nsst(read_file(transducer)));
            Ecsa e;
            eval_table(m, to_word(read_doc(input)), e);
            std::cout << e.dump();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
