// SPDX-License-Identifier: GPL-2.0
#include <linux/mm_types.h>

#define PG_zero_filled 27

/*
 * Note that zswap stored @page as a zero-filled page.
 */
void page_mark_zero_filled(struct page *page)
{
	set_bit(PG_zero_filled, &page->flags);
}

bool page_is_zero_filled(struct page *page)
{
	return test_bit(PG_zero_filled, &page->flags);
}
