"""Hypothesis strategies shared by the generator tests and the acceptance suite."""

from hypothesis import strategies as st

from policylint.templategen import Contact, PolicyConfig, Purpose

DATA_ITEMS = ["name", "home address", "email", "phone number", "location", "payment details", "date of birth", "order history", "shoe size"]
PURPOSES = [
    "provide better services to you",
    "send you receipts",
    "deliver your orders",
    "improve our website",
    "predict global trends",
    "adverts from 3rd parties",
    "show you offers you might like",
]
RETENTION = [
    "We delete your data after 12 months.",
    "Your data will be deleted if you do not use this website for a month.",
    "We keep your orders for 6 years to meet tax law.",
    "We keep your details until you close your account.",
]
SAFE_TEXT = st.text(alphabet=st.sampled_from("abcdefghijklmnopqrstuvwxyz "), min_size=3, max_size=20).map(str.strip).filter(bool)

purposes = st.lists(
    st.builds(Purpose, st.sampled_from(PURPOSES), st.booleans(), st.booleans()),
    min_size=0,
    max_size=3,
    unique_by=lambda p: p.text,
)
configs = st.builds(
    PolicyConfig,
    company_name=st.sampled_from(["Company X", "Tayside Books", "Acme Shoes"]),
    data_items=st.lists(st.sampled_from(DATA_ITEMS), min_size=1, max_size=4, unique=True)
    .filter(lambda items: any(i not in ("order history", "shoe size") for i in items))
    .map(tuple),
    purposes=purposes.map(tuple),
    retention_statement=st.sampled_from(RETENTION),
    contact=st.builds(
        Contact,
        email=st.from_regex(r"[a-z]{1,8}@[a-z]{1,8}\.example", fullmatch=True),
        phone=st.sampled_from([None, "01382 308000", "+44 1382 308000"]),
        dpo_name=st.sampled_from([None, "Anna Reid"]),
        access_request_timescale=st.sampled_from([None, "one month", "30 days"]),
    ),
    opt_in_data=st.sampled_from(["all order information", "your order history"]),
)
