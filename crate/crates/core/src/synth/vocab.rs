/// Anchor phrases templates draw their keywords from. No phrase is a
/// contiguous token run of another, so one phrase can never match inside
/// another.
pub const KEYWORD_POOL: &[&str] = &[
    "Account No.",
    "Account Name",
    "Account Type",
    "Account Holder",
    "BSB",
    "Statement Period",
    "Opening Balance",
    "Closing Balance",
    "Customer Number",
    "Branch Code",
    "Interest Rate",
    "Total Credits",
    "Total Debits",
    "Page",
    "Statement Date",
    "Swift Code",
    "Reference",
    "Transaction Details",
    "Credit Limit",
    "Available Funds",
    "Bank Name",
    "Post Code",
    "Tax File",
    "Payment Due",
    "Minimum Payment",
    "Card Number",
    "Overdraft Limit",
    "Enquiries",
    "Billing Address",
    "Fees Charged",
    "Interest Earned",
    "Biller Code",
    "Opening Date",
    "Product Name",
    "Loan Term",
    "Repayment Amount",
    "Offset Account",
    "Date Range",
    "Member Number",
    "Joint Holder",
];

/// Filler tokens. Entries that collide with a keyword token are filtered out
/// at generation time unless collision stress is enabled.
pub const DISTRACTOR_POOL: &[&str] = &[
    "Deposit",
    "Withdrawal",
    "Transfer",
    "EFTPOS",
    "Salary",
    "ATM",
    "Visa",
    "Debit",
    "Groceries",
    "Rent",
    "Fuel",
    "Coffee",
    "Online",
    "Mobile",
    "Cheque",
    "Direct",
    "Sydney",
    "Melbourne",
    "Brisbane",
    "Perth",
    "Adelaide",
    "Hobart",
    "Darwin",
    "Pty",
    "Ltd",
    "Street",
    "Road",
    "Avenue",
    "Dividend",
    "Refund",
    "Insurance",
    "Utilities",
    "Pharmacy",
    "Subscription",
    "Council",
    "Rates",
    "Parking",
    "Toll",
    "Wages",
    "Charity",
];
