"""Text formats for automata: the native line format and a HOA subset."""
import re

from hdcw.automaton import CoBuchiAutomaton
from hdcw.errors import FormatError
from hdcw.words import Alphabet

NATIVE_HEADER = "coBuchi v1"


def dumps(A):
    """Serialize in the native format; state labels become ``# pair`` comments."""
    lines = [NATIVE_HEADER, "alphabet " + " ".join(A.alphabet.symbols), "states %d" % A.num_states]
    lines.append("initial " + " ".join(str(q) for q in sorted(A.initial)))
    for q in sorted(A.labels):
        lines.append("# pair %d %s" % (q, A.labels[q]))
    for p, a, r, q in sorted(A.transitions):
        lines.append("trans %d %s %d %d" % (p, A.alphabet.symbols[a], r, q))
    return "\n".join(lines) + "\n"


def loads(text):
    """Parse native or HOA text (detected from the first line)."""
    stripped = text.lstrip()
    if stripped.startswith("HOA:"):
        return loads_hoa(text)
    return loads_native(text)


def loads_native(text):
    alphabet, n, initial, trans, labels = None, None, None, [], {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*pair\s+(\d+)\s+(.*?)\s*$", line)
            if m:
                labels[int(m.group(1))] = m.group(2)
            continue
        parts = line.split()
        try:
            if not seen_header:
                if line != NATIVE_HEADER:
                    raise FormatError("expected %r header" % NATIVE_HEADER)
                seen_header = True
            elif parts[0] == "alphabet":
                alphabet = Alphabet(parts[1:])
            elif parts[0] == "states":
                n = int(parts[1])
            elif parts[0] == "initial":
                initial = [int(x) for x in parts[1:]]
            elif parts[0] == "trans":
                if alphabet is None:
                    raise FormatError("trans before alphabet")
                if len(parts) != 5:
                    raise FormatError("trans needs: src letter rank dst")
                if parts[2] not in alphabet.index:
                    raise FormatError("unknown letter %r" % parts[2])
                trans.append((int(parts[1]), alphabet.index[parts[2]], int(parts[3]), int(parts[4])))
            else:
                raise FormatError("unknown directive %r" % parts[0])
        except FormatError as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from None
        except (ValueError, IndexError) as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from None
    if alphabet is None or n is None or initial is None:
        raise FormatError("missing alphabet, states or initial line")
    try:
        return CoBuchiAutomaton(alphabet, n, initial, trans, labels)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dumps_hoa(A):
    k = A.k
    lines = ["HOA: v1", "States: %d" % A.num_states]
    lines += ["Start: %d" % q for q in sorted(A.initial)]
    lines.append("AP: %d %s" % (k, " ".join('"%s"' % s for s in A.alphabet.symbols)))
    lines += ["acc-name: co-Buchi", "Acceptance: 1 Fin(0)", "--BODY--"]

    def label(a):
        return "&".join(str(j) if j == a else "!%d" % j for j in range(k))

    for p in range(A.num_states):
        lines.append("State: %d" % p)
        for a in range(k):
            for q, r in A.succ[p][a]:
                lines.append("[%s] %d%s" % (label(a), q, " {0}" if r == 1 else ""))
    lines.append("--END--")
    return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"\s*(\d+|[tf]|[!&|()])")


def _parse_label(expr):
    """Parse a HOA label expression into a predicate over the true-AP index."""
    tokens = []
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            raise FormatError("bad label %r" % expr)
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def disj():
        terms = [conj()]
        while peek() == "|":
            take()
            terms.append(conj())
        return lambda j: any(t(j) for t in terms)

    def conj():
        terms = [atom()]
        while peek() == "&":
            take()
            terms.append(atom())
        return lambda j: all(t(j) for t in terms)

    def atom():
        tok = take()
        if tok == "!":
            inner = atom()
            return lambda j: not inner(j)
        if tok == "(":
            inner = disj()
            if take() != ")":
                raise FormatError("unbalanced label %r" % expr)
            return inner
        if tok == "t":
            return lambda j: True
        if tok == "f":
            return lambda j: False
        if tok is not None and tok.isdigit():
            ap = int(tok)
            return lambda j: j == ap
        raise FormatError("bad label %r" % expr)

    pred = disj()
    if peek() is not None:
        raise FormatError("trailing input in label %r" % expr)
    return pred


def loads_hoa(text):
    n, starts, aps, acceptance = None, [], None, None
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].strip() != "--BODY--":
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("/*"):
            continue
        key, _, rest = line.partition(":")
        rest = rest.strip()
        if key == "States":
            n = int(rest)
        elif key == "Start":
            if "&" in rest:
                raise FormatError("alternating start states are not supported")
            starts.append(int(rest))
        elif key == "AP":
            aps = re.findall(r'"([^"]*)"', rest)
            if int(rest.split()[0]) != len(aps):
                raise FormatError("AP count mismatch")
        elif key == "Acceptance":
            acceptance = " ".join(rest.split())
    if acceptance != "1 Fin(0)":
        raise FormatError("only 'Acceptance: 1 Fin(0)' is supported, got %r" % acceptance)
    if n is None or aps is None:
        raise FormatError("missing States or AP header")
    alphabet = Alphabet(aps)
    trans = []
    state, state_mark = None, False
    for line in lines[i + 1:]:
        line = line.strip()
        if not line or line == "--END--":
            continue
        if line.startswith("State:"):
            m = re.match(r"State:\s*(\d+)(?:\s+\"[^\"]*\")?\s*(\{[^}]*\})?\s*$", line)
            if not m:
                raise FormatError("bad state line %r" % line)
            state = int(m.group(1))
            state_mark = m.group(2) is not None and "0" in m.group(2)[1:-1].split()
            continue
        m = re.match(r"\[(.*)\]\s*(\d+)\s*(\{[^}]*\})?\s*$", line)
        if not m or state is None:
            raise FormatError("bad edge line %r" % line)
        pred = _parse_label(m.group(1))
        dst = int(m.group(2))
        marked = state_mark or (m.group(3) is not None and "0" in m.group(3)[1:-1].split())
        for a in range(len(aps)):
            if pred(a):
                trans.append((state, a, 1 if marked else 2, dst))
    try:
        return CoBuchiAutomaton(alphabet, n, starts, trans)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write(A, path, fmt="native"):
    text = dumps_hoa(A) if fmt == "hoa" else dumps(A)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def dumps_dot(A):
    lines = ["digraph A {", "  rankdir=LR;"]
    for q in range(A.num_states):
        shape = "doublecircle" if q in A.initial else "circle"
        lines.append('  %d [shape=%s, label="%s"];' % (q, shape, A.labels.get(q, q)))
    for p, a, r, q in sorted(A.transitions):
        style = "solid" if r == 2 else "dashed"
        lines.append('  %d -> %d [label="%s:%d", style=%s];' % (p, q, A.alphabet.symbols[a], r, style))
    lines.append("}")
    return "\n".join(lines) + "\n"
