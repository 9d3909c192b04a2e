"""Command-line entry point: ``hdcw <command> ...``."""
import argparse
import os
import sys

from hdcw import io as aut_io
from hdcw import samples
from hdcw.automaton import DET_CAP, equivalent, hd_certificate, member_up, rank2_scc, structural_checks
from hdcw.errors import AlphabetError, CapExceeded, FormatError
from hdcw.families import FAMILIES, FamilySpec, make

EXIT_OK, EXIT_NO, EXIT_FORMAT, EXIT_CAP = 0, 1, 2, 3


def _read_automaton(path):
    if not os.path.isfile(path):
        raise FormatError("no such file: %s" % path)
    return aut_io.read(path)


def _emit_automaton(A, args):
    text = aut_io.dumps_hoa(A) if args.format == "hoa" else aut_io.dumps(A)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(aut_io.dumps_dot(A))


def _orbit_cap(args):
    return args.profile_cap


def cmd_minimize(args):
    from hdcw.canonical import minimize

    ca = minimize(_read_automaton(args.input), det_cap=args.det_cap, orbit_cap=_orbit_cap(args))
    _emit_automaton(ca.automaton, args)
    return EXIT_OK


def cmd_learn(args):
    from hdcw.learner import learn_verbose

    if not os.path.isfile(args.sample):
        raise FormatError("no such file: %s" % args.sample)
    res = learn_verbose(samples.read(args.sample))
    if res.aborted:
        print("learner aborted (%s); returning the default automaton" % res.reason, file=sys.stderr)
    _emit_automaton(res.automaton, args)
    return EXIT_OK


def cmd_charsample(args):
    from hdcw.oracle import build_oracle

    o = build_oracle(_read_automaton(args.input), det_cap=args.det_cap, orbit_cap=_orbit_cap(args))
    S = samples.charsample(o)
    if args.extend:
        S = samples.extend_consistently(S, o, args.extend, args.seed)
    text = samples.dumps(S)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_member(args):
    A = _read_automaton(args.input)
    w = A.alphabet.parse_up(args.word)
    verdict = member_up(A, w)
    print("true" if verdict else "false")
    return EXIT_OK if verdict else EXIT_NO


def cmd_equiv(args):
    A, B = _read_automaton(args.a), _read_automaton(args.b)
    same, cex = equivalent(A, B, args.det_cap)
    if same:
        print("true")
        return EXIT_OK
    print("false")
    print(A.alphabet.format_up(cex))
    return EXIT_NO


def cmd_gen(args):
    _emit_automaton(make(FamilySpec(args.family, args.k)), args)
    return EXIT_OK


def cmd_stats(args):
    A = _read_automaton(args.input)
    rep = structural_checks(A)
    lab = rank2_scc(A)
    safe_sccs = {lab[p] for p, _a, r, q in A.transitions if r == 2 and lab[p] == lab[q]}
    rank2 = sum(1 for t in A.transitions if t[2] == 2)
    print("states %d" % A.num_states)
    print("transitions %d" % len(A.transitions))
    print("rank1_transitions %d" % (len(A.transitions) - rank2))
    print("rank2_transitions %d" % rank2)
    print("initial_states %d" % len(A.initial))
    print("deterministic %s" % str(A.is_deterministic).lower())
    print("complete %s" % str(A.is_complete).lower())
    for name in ("normalized", "semantically_deterministic", "unsafe_saturated", "safe_deterministic"):
        print("%s %s" % (name, str(getattr(rep, name)).lower()))
    print("hd_certificate %s" % str(hd_certificate(A)).lower())
    print("safe_sccs %d" % len(safe_sccs))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="hdcw", description="Minimal history-deterministic co-Büchi automata.")
    p.add_argument("--det-cap", type=int, default=DET_CAP, help="determinization state limit")
    p.add_argument("--profile-cap", type=int, default=None,
                   help="profile monoid limit (default: $HDCW_PROFILE_CAP or 10^6)")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def out_opts(sp):
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("native", "hoa"), default="native")
        sp.add_argument("--dot", help="also write a Graphviz file")

    sp = sub.add_parser("minimize", help="canonical minimal HD automaton")
    sp.add_argument("-i", "--input", required=True)
    out_opts(sp)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("learn", help="passive learner on a sample file")
    sp.add_argument("-s", "--sample", required=True)
    out_opts(sp)
    sp.set_defaults(func=cmd_learn)

    sp = sub.add_parser("charsample", help="characteristic sample for an automaton's language")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output")
    sp.add_argument("--extend", type=int, default=0, help="add N seeded random consistent entries")
    sp.set_defaults(func=cmd_charsample)

    sp = sub.add_parser("member", help="membership of a lasso u:v")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-w", "--word", required=True)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("equiv", help="language equivalence with a counterexample")
    sp.add_argument("-a", required=True)
    sp.add_argument("-b", required=True)
    sp.set_defaults(func=cmd_equiv)

    sp = sub.add_parser("gen", help="reference automaton of a built-in family")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("-k", type=int, default=1)
    out_opts(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("stats", help="counts and structural flags")
    sp.add_argument("-i", "--input", required=True)
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print("hdcw: cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except (FormatError, AlphabetError, ValueError) as exc:
        print("hdcw: %s" % exc, file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print("hdcw: %s" % exc, file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
