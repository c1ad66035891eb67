#!/usr/bin/env python3
"""Fine-tunes / scores a pretrained encoder with a binary head for emogap.

Invoked by the C++ encoder backend. File protocol:
  train:   --data holds "<0|1>\t<escaped text>" lines; the fine-tuned model
           and tokenizer are written to --out.
  predict: --data holds one escaped text per line; --out receives one
           positive-class probability per line.
Text escaping matches emogap's keyed-text format (\\t, \\n, \\r, \\\\).
"""

import argparse
import random
import sys


def unescape(s):
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def read_lines(path):
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


def seed_everything(seed):
    import numpy as np
    import torch

    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def count_truncated(tokenizer, texts, max_length):
    lengths = [len(tokenizer(t, truncation=False)["input_ids"]) for t in texts]
    return sum(1 for n in lengths if n > max_length)


def train(args):
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    seed_everything(args.seed)
    rows = [line.split("\t", 1) for line in read_lines(args.data)]
    labels = [int(r[0]) for r in rows]
    texts = [unescape(r[1]) if len(r) > 1 else "" for r in rows]

    tokenizer = AutoTokenizer.from_pretrained(args.checkpoint)
    model = AutoModelForSequenceClassification.from_pretrained(
        args.checkpoint,
        num_labels=2,
        hidden_dropout_prob=args.dropout,
        attention_probs_dropout_prob=args.dropout,
    )
    truncated = count_truncated(tokenizer, texts, args.max_length)
    if truncated:
        print(f"truncated {truncated} of {len(texts)} texts to {args.max_length} tokens", file=sys.stderr)

    weight = None
    if args.class_weighting:
        pos = sum(labels)
        n = len(labels)
        weight = torch.tensor([n / (2.0 * (n - pos)), n / (2.0 * pos)], dtype=torch.float)
    loss_fn = torch.nn.CrossEntropyLoss(weight=weight)
    optimizer = torch.optim.Adam(model.parameters(), lr=args.learning_rate)
    generator = torch.Generator().manual_seed(args.seed)

    model.train()
    for epoch in range(args.epochs):
        order = torch.randperm(len(texts), generator=generator).tolist()
        total = 0.0
        for start in range(0, len(order), args.batch_size):
            idx = order[start : start + args.batch_size]
            batch = tokenizer(
                [texts[i] for i in idx],
                padding=True,
                truncation=True,
                max_length=args.max_length,
                return_tensors="pt",
            )
            target = torch.tensor([labels[i] for i in idx], dtype=torch.long)
            logits = model(**batch).logits
            loss = loss_fn(logits, target)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss) * len(idx)
        print(f"epoch {epoch + 1}/{args.epochs} loss {total / len(texts):.6f}", file=sys.stderr)

    model.save_pretrained(args.out)
    tokenizer.save_pretrained(args.out)


def predict(args):
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    seed_everything(0)
    texts = [unescape(line) for line in read_lines(args.data)]
    tokenizer = AutoTokenizer.from_pretrained(args.model)
    model = AutoModelForSequenceClassification.from_pretrained(args.model)
    model.eval()
    scores = []
    with torch.no_grad():
        for start in range(0, len(texts), args.batch_size):
            chunk = texts[start : start + args.batch_size]
            # One text per forward pass keeps scores independent of padding.
            for text in chunk:
                batch = tokenizer([text], truncation=True, max_length=args.max_length, return_tensors="pt")
                probs = torch.softmax(model(**batch).logits.double(), dim=-1)
                scores.append(float(probs[0, 1]))
    with open(args.out, "w", encoding="utf-8") as f:
        for s in scores:
            f.write(f"{s:.17g}\n")


def main():
    parser = argparse.ArgumentParser()
    sub = parser.add_subparsers(dest="command", required=True)
    t = sub.add_parser("train")
    t.add_argument("--checkpoint", required=True)
    t.add_argument("--data", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--epochs", type=int, default=3)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--learning-rate", type=float, default=2e-5)
    t.add_argument("--dropout", type=float, default=0.1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--max-length", type=int, default=128)
    t.add_argument("--class-weighting", action="store_true")
    p = sub.add_parser("predict")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--max-length", type=int, default=128)
    args = parser.parse_args()
    if args.command == "train":
        train(args)
    else:
        predict(args)


if __name__ == "__main__":
    main()
