"""Regenerates data/omt_tree.json."""
import json
import pathlib
def leaf(i, label, anchored, family, slots, fixed):
    return dict(id=i, label=label, kind="leaf", question="", children=[], anchored=anchored,
                template=dict(family=family, slots=[dict(name=n, kind=k) for n, k in slots], fixed=fixed))
def internal(i, label, question, children):
    return dict(id=i, label=label, kind="internal", question=question, anchored=False, template=None,
                children=[dict(answer=a, child=c) for a, c in children])
E="expression"; V="variable"; L="variable-list"; R="rational"; P="positive-integer"
nodes = [
 internal(0, "root", "What does this requirement of the business problem do?", [
   ("a limit or requirement on a quantity", 25),
   ("two quantities must balance", 27),
   ("a choice among yes/no options", 10),
   ("a logical condition linking decisions", 28),
   ("a decision is fixed in advance", 19)]),
 leaf(1, "knapsack-limit", False, "Bound", [("expr",E),("bound",R)], {"sense":"LE","bound":"constant","shape":"weighted"}),
 leaf(2, "variable-upper-bound", True, "Bound", [("expr",E),("bound",E)], {"sense":"LE","bound":"expression"}),
 leaf(3, "conditional-upper-bound", True, "ConditionalBound", [("expr",E),("bound",R),("indicator",V)], {"sense":"LE","bound":"constant","off_behavior":"ForceZero"}),
 leaf(4, "demand-requirement", False, "Bound", [("expr",E),("bound",R)], {"sense":"GE","bound":"constant","shape":"weighted"}),
 leaf(5, "minimum-level", False, "Bound", [("var",V),("bound",R)], {"sense":"GE","bound":"constant","shape":"single"}),
 internal(6, "lower-bounds", "What sets the minimum the quantity must reach?", [
   ("a fixed number on a weighted total", 4),
   ("a fixed minimum level of one quantity", 5),
   ("another decision variable", 8),
   ("a fixed number, only while a yes/no decision is on", 9)]),
 leaf(7, "storage-limit", True, "Bound", [("var",V),("bound",R)], {"sense":"LE","bound":"constant","shape":"single"}),
 leaf(8, "variable-lower-bound", True, "Bound", [("expr",E),("bound",E)], {"sense":"GE","bound":"expression"}),
 leaf(9, "conditional-lower-bound", True, "ConditionalBound", [("expr",E),("bound",R),("indicator",V)], {"sense":"GE","bound":"constant","off_behavior":"ForceZero"}),
 internal(10, "choice", "How many of the yes/no options may be chosen?", [
   ("at most one", 11),
   ("exactly one", 17),
   ("at least one", 18),
   ("at most a weighted amount", 20),
   ("exactly a weighted amount", 21)]),
 leaf(11, "set-packing", True, "SetPacking", [("members",L)], {"weighted":"false"}),
 leaf(12, "inter-period-balance", True, "Balance", [("lhs",E),("rhs",E)], {"flavor":"interperiod"}),
 leaf(13, "assignment-equality", True, "Balance", [("lhs",E),("rhs",E)], {"flavor":"assignment"}),
 leaf(14, "flow-balance", True, "Balance", [("lhs",E),("rhs",E)], {"flavor":"flow"}),
 leaf(15, "blending-balance", False, "Balance", [("lhs",E),("rhs",E)], {"flavor":"blending"}),
 leaf(16, "initial-condition", False, "Balance", [("lhs",E),("rhs",E)], {"flavor":"initial"}),
 leaf(17, "set-partitioning", True, "SetPartitioning", [("members",L)], {"weighted":"false"}),
 leaf(18, "set-covering", False, "SetCovering", [("members",L)], {"weighted":"false"}),
 leaf(19, "variable-fixing", True, "VariableFix", [("var",V),("value",R)], {}),
 leaf(20, "weighted-set-packing", False, "SetPacking", [("weighted_members",E),("rhs",P)], {"weighted":"true"}),
 leaf(21, "weighted-set-partitioning", False, "SetPartitioning", [("weighted_members",E),("rhs",P)], {"weighted":"true"}),
 leaf(22, "either-or", False, "EitherOr", [("first",E),("first_bound",R),("second",E),("second_bound",R)], {"sense":"LE"}),
 leaf(23, "if-then", False, "IfThen", [("antecedents",L),("consequent",V)], {"consequents":"single"}),
 leaf(24, "if-then-multiple", True, "IfThen", [("antecedents",L),("consequents",L)], {"consequents":"multiple"}),
 internal(25, "bounds", "Is the quantity capped from above or required from below?", [
   ("an upper limit (supply or capacity)", 26),
   ("a lower requirement (demand or minimum)", 6)]),
 internal(26, "upper-bounds", "What sets the limit on the quantity?", [
   ("a fixed number on a weighted total", 1),
   ("another decision variable", 2),
   ("a fixed number, only while a yes/no decision is on", 3),
   ("a fixed storage or stock limit on one quantity", 7)]),
 internal(27, "balancing", "What kind of balance is required?", [
   ("quantities across two consecutive time periods", 12),
   ("assigning a quantity its value", 13),
   ("flow or inventory in equals out", 14),
   ("blending inputs into an output", 15),
   ("setting an initial condition", 16)]),
 internal(28, "logic", "What kind of logical condition links the decisions?", [
   ("if one thing happens, several others must happen", 24),
   ("if one thing happens, another must happen", 23),
   ("at least one of two conditions must hold", 22)]),
]
doc = {"schema_version": "1", "root": 0, "nodes": nodes}
open(pathlib.Path(__file__).resolve().parent.parent / "data" / "omt_tree.json", "w").write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
