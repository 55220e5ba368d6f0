"""A guided tour of the engine on the worked examples: the four-transition
process, the mixed forward/backward state, contexts that change a past,
replication policies, and the RCCS/CCSK encodings.

Run with:  python demos/walkthrough.py
"""
from revccs import (HOLE, MCDup, MCHole, MCPair, ReplConfig, RevContext,
                    apply_rev_context, bf_bisimilar, concurrent_r,
                    enumerate_all, enumerate_fwd_r, identify, initial_state,
                    origin, parse_process, parse_state, print_ccsk,
                    print_rccs, print_state, to_ccsk, to_rccs)
from revccs.ilts import enumerate_fwd
from revccs.memory import EMPTY
from revccs.syntax import NIL, Par, Prefix, inp


def banner(text):
    print(f"\n== {text}")


banner("four transitions of a + b | ~a.c")
ip = identify(parse_process("a + b | ~a.c"))
print("identified:", ip)
for t in enumerate_fwd(ip):
    print(f"  --[{t.ident} : {t.label}]-->  {t.target}")

banner("stepping backward and forward from a mixed state")
s = parse_state("((2,2),(3,2)) o [<#0, a, (+, b, R)>, <#1, ~a, _>] |> 0 | c")
moves = enumerate_all(s)
for t in moves:
    print(f"  {t.direction} {t.ident} {t.label}  ->  {print_state(t.target)}")
print("  forward c conflicts with undoing ~a:",
      not concurrent_r(moves[0], moves[2]))
print("  origin:", print_state(origin(s)))

banner("a context can graft a past onto a process")
r = parse_state("(1,1) o <#0, a, _> |> b")
pctx = Par(Prefix(inp("p"), NIL), HOLE)
padded = apply_rev_context(RevContext(MCPair(EMPTY, MCHole()), pctx), r)
copied = apply_rev_context(RevContext(MCDup(MCHole()), pctx), r)
print("  memory-padded:", print_state(padded), "->",
      print_state(origin(padded)))
print("  memory-copied:", print_state(copied), "->",
      print_state(origin(copied)))

banner("the non-congruence pair")
print("  origins bisimilar:",
      bool(bf_bisimilar(initial_state(parse_process("a.(b + b)")),
                        initial_state(parse_process("(a.b) + (a.b)")))))
print("  wrapped in . + c  :",
      bool(bf_bisimilar(initial_state(parse_process("a.((b + b) + c)")),
                        initial_state(parse_process("(a.(b + c)) + (a.b)")))))

banner("replication marks protect duplicated memories")
cfg = ReplConfig("A")
state = initial_state(parse_process("a.!b"))
for _ in range(2):
    state = enumerate_fwd_r(state, cfg)[0].target
print("  after a then a replicated b:", print_state(state))
print("  sole undo:", print_state(enumerate_all(state, cfg)[-1].target))

banner("encodings of the appendix example")
zs = parse_state("(((0,4),(1,4)),(2,4)) o "
                 "[[<#0, a, _>, <#4, c, _>.<#0, a, _>], <#0, a, _>]"
                 " |> (b | 0) | d")
print("  RCCS:", print_rccs(to_rccs(zs)))
print("  CCSK:", print_ccsk(to_ccsk(zs)))
