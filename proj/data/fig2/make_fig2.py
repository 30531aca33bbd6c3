"""Builds the three-maximum fixture: vocabulary, scripted provider table and prompt.

The prompt ends in "\\n    re", which greedy longest-match encodes as
["\\n", "   ", " re"]. Without alignment the table continues " re" with
" = []"; with alignment it rebuilds the last three tokens as
"\\n", "   ", " return" and completes the function.
"""
import base64
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent

WORDS = ["   ", " re", " return", " =", " []", " sorted", "(l)", "(l):", "[-3:]",
         "def", " three", "_max", " max", " write", " a", " function", " to",
         " get", " maximum", " numbers", " from", " list"]
EOS = "<eos>"

PROMPT = "# write a function to get three maximum numbers from a list\ndef three_max(l):\n    re"

# decoded-context suffix -> most likely next token
ROWS = {
    "    re": " =",
    "re =": " []",
    "= []": "\n",
    "[]\n": EOS,
    "(l):": "\n",
    ":\n": "   ",
    ":\n   ": " return",
    "return": " sorted",
    "return sorted": "(l)",
    "sorted(l)": "[-3:]",
    "[-3:]": "\n",
    ":]\n": EOS,
}


def main():
    tokens = [bytes([b]) for b in range(256)] + [w.encode() for w in WORDS] + [EOS.encode()]
    ids = {t: i for i, t in enumerate(tokens)}
    eos = len(tokens) - 1

    def entry(i, t):
        try:
            return {"id": i, "text": t.decode("utf-8")}
        except UnicodeDecodeError:
            return {"id": i, "bytes_b64": base64.b64encode(t).decode()}

    vocab = {"version": 1, "tokens": [entry(i, t) for i, t in enumerate(tokens)],
             "merges": [], "specials": [eos]}
    (HERE / "vocab.json").write_text(json.dumps(vocab, indent=1) + "\n")

    def row(target_id):
        rest = 0.1 / (len(tokens) - 1)
        probs = [rest] * len(tokens)
        probs[target_id] = 0.9
        return probs

    table = {
        "rows": [{"suffix_b64": base64.b64encode(s.encode()).decode(),
                  "probs": row(ids[t.encode()])} for s, t in ROWS.items()],
        "default": row(eos),
    }
    (HERE / "table.json").write_text(json.dumps(table) + "\n")
    (HERE / "prompts.jsonl").write_text(json.dumps({"id": "three_max", "prompt": PROMPT}) + "\n")


if __name__ == "__main__":
    main()
